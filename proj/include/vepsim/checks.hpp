#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vepsim/mesh.hpp"
#include "vepsim/model.hpp"

namespace vepsim {

struct CheckReport {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TraceNormReport {
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max over samples of LHS / RHS
};

/// Integral form of tr(D)^p <= d^(p-1) sum_ij |D_ij|^p on `samples` random
/// symmetric P1 tensor fields with entries uniform in [-1, 1].
TraceNormReport check_trace_norm_inequality(const Mesh& mesh, int samples, int p,
                                            std::uint64_t seed);

/// First and second derivatives of a stream function psi.
struct StreamFunction {
  std::string name;
  std::function<double(double, double)> psi_x;
  std::function<double(double, double)> psi_y;
  std::function<double(double, double)> psi_xx;
  std::function<double(double, double)> psi_xy;
  std::function<double(double, double)> psi_yy;
};

/// The three test stream functions on the unit square.
std::vector<StreamFunction> korn_stream_functions();

struct KornReport {
  double grad_norm2 = 0.0;  // integral of |grad u|^2
  double sym_norm2 = 0.0;   // 2 * integral of |D u|^2
  double difference() const { return grad_norm2 - sym_norm2; }
};

/// Both sides of the Korn equality for u = (psi_y, -psi_x), evaluated with
/// the exact gradients at the quadrature points of the mesh.
KornReport check_korn_equality(const Mesh& mesh, const StreamFunction& sf);
/// Same for the P1 interpolant of an arbitrary velocity.
KornReport check_korn_equality(const Mesh& mesh, const std::function<double(double, double)>& ux,
                               const std::function<double(double, double)>& uy);

struct GradientCheckReport {
  double max_rel_error_f = 0.0;       // F' against central differences of F
  double max_rel_error_fprime = 0.0;  // F'' against central differences of F'
};

/// Compares the analytic derivatives of the potential with central
/// differences (step 1e-5) on a grid of phi in [0.05, 0.95]; errors are
/// scaled by 1 + |derivative|.
GradientCheckReport check_potential_gradients(const ModelParams& params);

/// The property suite behind the `check` command.
std::vector<CheckReport> run_property_checks();

}  // namespace vepsim
