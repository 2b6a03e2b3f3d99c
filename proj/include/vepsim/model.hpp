#pragma once

#include <optional>
#include <string>

namespace vepsim {

enum class PotentialKind { GinzburgLandau, ModifiedGinzburgLandau, FloryHuggins };

std::string to_string(PotentialKind k);
/// Accepts "ginzburg_landau", "modified_gl", "flory_huggins".
PotentialKind parse_potential_kind(const std::string& name);

/// Homogeneous free energy F(phi) and its parameters.
struct Potential {
  PotentialKind kind = PotentialKind::ModifiedGinzburgLandau;
  double gl_a = 1.0;  // F = a phi^2 (phi-1)^2
  double well_a = 0.134791;
  double well_b = 1.0 - 0.134791;  // F = (phi-a)^2 (phi-b)^2
  double n_p = 1.0;
  double n_s = 1.0;
  double chi = 28.0 / 11.0;
};

/// Optional constant replacements of the coefficient functions. Used for
/// reduced models (e.g. m = 1, n = 0) and parameter studies.
struct CoefficientOverrides {
  std::optional<double> m;
  std::optional<double> n;
  std::optional<double> A;
  std::optional<double> tau;
  std::optional<double> h;
  std::optional<double> eta;
};

struct ModelParams {
  double c0 = 1.0;      // interface energy coefficient
  double eps = 1.0;     // conformation diffusion
  double kappa = 1.0;   // weight of the phi-q cross diffusion, in [0,1]
  double delta0 = 0.1;  // pressure stabilization
  Potential potential;
  double phi_star = 0.4;
  double clamp_lower = 1e-4;
  double clamp_upper = 1.0 - 1e-4;
  double eta_min = 1e-3;
  double fh_delta = 1e-6;
  CoefficientOverrides overrides;
};

/// Throws ParameterError when an invariant of ModelParams is violated.
void validate(const ModelParams& p);

enum class Coefficient {
  Mobility,               // m
  CrossMobility,          // n
  BulkModulus,            // A
  BulkModulusDerivative,  // A'
  RelaxationTime,         // tau
  ElasticRelaxation,      // h
  Viscosity,              // eta
};

/// The model's scalar closures
///   m = phi^2(1-phi)^2, n = phi(1-phi), A = 3/2 + tanh(1e3 [cot(pi phi*) - cot(pi phi)])/2,
///   tau = 10 phi^2, h = 1/(5 phi^2), eta = 1 - phi^2
/// with phi clamped to [clamp_lower, clamp_upper] inside tau, h and the
/// cotangent of A, eta floored at eta_min, and m, n floored at zero.
class Coefficients {
 public:
  explicit Coefficients(const ModelParams& p);

  double m(double phi) const;
  double n(double phi) const;
  double A(double phi) const;
  double dA(double phi) const;
  double tau(double phi) const;
  double h(double phi) const;
  double eta(double phi) const;

  double eval(Coefficient which, double phi) const;
  double clamp(double phi) const;

 private:
  ModelParams p_;
  double cot_star_;
};

double eval_coefficient(const Coefficients& c, Coefficient which, double phi);

double potential_F(const ModelParams& p, double phi);
/// F'(phi)
double potential_f(const ModelParams& p, double phi);
/// F''(phi)
double potential_fprime(const ModelParams& p, double phi);

/// Linearly implicit approximation f(old) + (new-old) f'(old) / 2.
double f_taylor(const ModelParams& p, double phi_old, double phi_new);

/// Symmetric 2x2 tensor (C11, C12, C22).
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
};

/// Initial data of a run. Lengths of the rotating ball are given as fractions
/// of the domain so that presets scale to any box.
struct InitialConditionSpec {
  double phi_mean = 0.4;
  double noise_amplitude = 1e-3;
  double q0 = 0.0;
  Tensor2 C0{1.0, 0.0, 1.0};
  bool rotation = false;
  double ball_radius_fraction = 50.0 / 128.0;
};

struct ExperimentPreset {
  ModelParams params;
  InitialConditionSpec initial;
};

/// Experiments 1-3 of the spinodal decomposition study. Throws
/// ParameterError for other ids.
ExperimentPreset experiment_preset(int id);

/// Initial velocity of the rotation preset at point (x,y) of [0,lx]x[0,ly]:
/// ((y-yc)/ly, (xc-x)/lx) inside the closed ball around the centre.
void rotation_velocity(const InitialConditionSpec& ic, double lx, double ly, double x, double y,
                       double& ux, double& uy);

}  // namespace vepsim
