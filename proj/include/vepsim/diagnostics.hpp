#pragma once

#include "vepsim/fields.hpp"
#include "vepsim/mesh.hpp"
#include "vepsim/model.hpp"

namespace vepsim {

/// Energy components and monitoring quantities of one time level.
struct EnergyReport {
  int step = 0;
  double t = 0.0;
  double E_mix = 0.0;   // c0/2 |grad phi|^2 + F(phi)
  double E_bulk = 0.0;  // q^2 / 2
  double E_kin = 0.0;   // |u|^2 / 2
  double E_el = 0.0;    // tr(C)^2 / 4 - ln(det C) / 2 over SPD quadrature points
  double E_alg = 0.0;   // E_mix + E_bulk + E_kin + |C|_F^2 / 4
  double E_tot = 0.0;   // E_mix + E_bulk + E_kin + E_el
  double mass = 0.0;    // mean of phi
  double mass_drift = 0.0;
  double dE = 0.0;
  double spd_fraction = 1.0;  // share of nodes with SPD C
  double cfl = 0.0;
  int fp_iters = 0;
};

/// Fills the energy, mass and SPD fields; step, t, drift, dE, cfl and
/// fp_iters are left for the caller.
EnergyReport energy_components(const Mesh& mesh, const ModelParams& params, const ScalarField& phi,
                               const ScalarField& q, const VectorField& u, const TensorField& C);

/// True when C is treated as SPD (tr > 0 and det > 1e-14).
bool is_spd(const Tensor2& c);

/// Elastic density tr(C)^2/4 - ln(det C)/2; only meaningful for SPD C.
double elastic_density(const Tensor2& c);

/// Mean of phi over the domain.
double mass(const Mesh& mesh, const ScalarField& phi);
double mass_drift(double current, double initial);

/// Integral of h(phi) tr(C)^2 / 2, the source bound of the Frobenius energy.
double elastic_source_rate(const Mesh& mesh, const ModelParams& params, const ScalarField& phi,
                           const TensorField& C);

}  // namespace vepsim
