#include "vepsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vepsim/error.hpp"

namespace vepsim {

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::GinzburgLandau: return "ginzburg_landau";
    case PotentialKind::ModifiedGinzburgLandau: return "modified_gl";
    case PotentialKind::FloryHuggins: return "flory_huggins";
  }
  return "unknown";
}

PotentialKind parse_potential_kind(const std::string& name) {
  if (name == "ginzburg_landau") return PotentialKind::GinzburgLandau;
  if (name == "modified_gl") return PotentialKind::ModifiedGinzburgLandau;
  if (name == "flory_huggins") return PotentialKind::FloryHuggins;
  throw ParameterError("unknown potential '" + name + "'");
}

void validate(const ModelParams& p) {
  if (!(p.kappa >= 0.0 && p.kappa <= 1.0)) throw ParameterError("kappa must lie in [0,1]");
  if (!(p.eps > 0.0)) throw ParameterError("eps must be positive");
  if (!(p.c0 > 0.0)) throw ParameterError("c0 must be positive");
  if (!(p.delta0 >= 0.0)) throw ParameterError("delta0 must be non-negative");
  if (!(p.clamp_lower > 0.0 && p.clamp_lower < p.clamp_upper && p.clamp_upper < 1.0)) {
    throw ParameterError("clamp bounds must satisfy 0 < lower < upper < 1");
  }
  if (!(p.eta_min > 0.0)) throw ParameterError("eta_min must be positive");
  if (!(p.fh_delta > 0.0 && p.fh_delta < 0.5)) throw ParameterError("fh_delta must lie in (0, 0.5)");
  if (p.potential.kind == PotentialKind::FloryHuggins &&
      !(p.potential.n_p > 0.0 && p.potential.n_s > 0.0)) {
    throw ParameterError("Flory-Huggins molecular weights must be positive");
  }
}

Coefficients::Coefficients(const ModelParams& p)
    : p_(p), cot_star_(1.0 / std::tan(std::numbers::pi * std::clamp(p.phi_star, p.clamp_lower, p.clamp_upper))) {}

double Coefficients::clamp(double phi) const { return std::clamp(phi, p_.clamp_lower, p_.clamp_upper); }

double Coefficients::m(double phi) const {
  if (p_.overrides.m) return *p_.overrides.m;
  const double s = phi * (1.0 - phi);
  return std::max(s * s, 0.0);
}

double Coefficients::n(double phi) const {
  if (p_.overrides.n) return *p_.overrides.n;
  return std::max(phi * (1.0 - phi), 0.0);
}

double Coefficients::A(double phi) const {
  if (p_.overrides.A) return *p_.overrides.A;
  const double cot = 1.0 / std::tan(std::numbers::pi * clamp(phi));
  return 1.5 + 0.5 * std::tanh(1e3 * (cot_star_ - cot));
}

double Coefficients::dA(double phi) const {
  if (p_.overrides.A) return 0.0;
  const double c = clamp(phi);
  if (c != phi) return 0.0;
  const double s = std::sin(std::numbers::pi * c);
  const double cot = std::cos(std::numbers::pi * c) / s;
  const double th = std::tanh(1e3 * (cot_star_ - cot));
  return 0.5 * (1.0 - th * th) * 1e3 * std::numbers::pi / (s * s);
}

double Coefficients::tau(double phi) const {
  if (p_.overrides.tau) return *p_.overrides.tau;
  const double c = clamp(phi);
  return 10.0 * c * c;
}

double Coefficients::h(double phi) const {
  if (p_.overrides.h) return *p_.overrides.h;
  const double c = clamp(phi);
  return 1.0 / (5.0 * c * c);
}

double Coefficients::eta(double phi) const {
  if (p_.overrides.eta) return std::max(*p_.overrides.eta, p_.eta_min);
  return std::max(1.0 - phi * phi, p_.eta_min);
}

double Coefficients::eval(Coefficient which, double phi) const {
  switch (which) {
    case Coefficient::Mobility: return m(phi);
    case Coefficient::CrossMobility: return n(phi);
    case Coefficient::BulkModulus: return A(phi);
    case Coefficient::BulkModulusDerivative: return dA(phi);
    case Coefficient::RelaxationTime: return tau(phi);
    case Coefficient::ElasticRelaxation: return h(phi);
    case Coefficient::Viscosity: return eta(phi);
  }
  return 0.0;
}

double eval_coefficient(const Coefficients& c, Coefficient which, double phi) {
  return c.eval(which, phi);
}

namespace {

// x ln x continued as its second-order Taylor polynomial below `delta`, so the
// value and the first two derivatives stay consistent across the clamp.
struct XLogX {
  double delta;
  double value(double x) const {
    if (x >= delta) return x * std::log(x);
    const double d = x - delta;
    return delta * std::log(delta) + (std::log(delta) + 1.0) * d + 0.5 * d * d / delta;
  }
  double d1(double x) const {
    if (x >= delta) return std::log(x) + 1.0;
    return std::log(delta) + 1.0 + (x - delta) / delta;
  }
  double d2(double x) const { return 1.0 / std::max(x, delta); }
};

}  // namespace

double potential_F(const ModelParams& p, double phi) {
  const Potential& pot = p.potential;
  switch (pot.kind) {
    case PotentialKind::GinzburgLandau:
      return pot.gl_a * phi * phi * (phi - 1.0) * (phi - 1.0);
    case PotentialKind::ModifiedGinzburgLandau: {
      const double da = phi - pot.well_a;
      const double db = phi - pot.well_b;
      return da * da * db * db;
    }
    case PotentialKind::FloryHuggins: {
      const XLogX g{p.fh_delta};
      return g.value(phi) / pot.n_p + g.value(1.0 - phi) / pot.n_s + pot.chi * phi * (1.0 - phi);
    }
  }
  return 0.0;
}

double potential_f(const ModelParams& p, double phi) {
  const Potential& pot = p.potential;
  switch (pot.kind) {
    case PotentialKind::GinzburgLandau:
      return 2.0 * pot.gl_a * phi * (phi - 1.0) * (2.0 * phi - 1.0);
    case PotentialKind::ModifiedGinzburgLandau: {
      const double da = phi - pot.well_a;
      const double db = phi - pot.well_b;
      return 2.0 * da * db * (da + db);
    }
    case PotentialKind::FloryHuggins: {
      const XLogX g{p.fh_delta};
      return g.d1(phi) / pot.n_p - g.d1(1.0 - phi) / pot.n_s + pot.chi * (1.0 - 2.0 * phi);
    }
  }
  return 0.0;
}

double potential_fprime(const ModelParams& p, double phi) {
  const Potential& pot = p.potential;
  switch (pot.kind) {
    case PotentialKind::GinzburgLandau:
      return 2.0 * pot.gl_a * (6.0 * phi * phi - 6.0 * phi + 1.0);
    case PotentialKind::ModifiedGinzburgLandau: {
      const double da = phi - pot.well_a;
      const double db = phi - pot.well_b;
      return 2.0 * ((da + db) * (da + db) + 2.0 * da * db);
    }
    case PotentialKind::FloryHuggins: {
      const XLogX g{p.fh_delta};
      return g.d2(phi) / pot.n_p + g.d2(1.0 - phi) / pot.n_s - 2.0 * pot.chi;
    }
  }
  return 0.0;
}

double f_taylor(const ModelParams& p, double phi_old, double phi_new) {
  return potential_f(p, phi_old) + 0.5 * (phi_new - phi_old) * potential_fprime(p, phi_old);
}

ExperimentPreset experiment_preset(int id) {
  ExperimentPreset e;
  e.params.potential.kind = PotentialKind::ModifiedGinzburgLandau;
  e.initial.phi_mean = 0.4;
  e.initial.noise_amplitude = 1e-3;
  switch (id) {
    case 1:
      e.initial.C0 = {std::numbers::sqrt2, 0.0, std::numbers::sqrt2};
      break;
    case 2:
      e.params.potential.kind = PotentialKind::FloryHuggins;
      e.params.potential.n_p = 1.0;
      e.params.potential.n_s = 1.0;
      e.params.potential.chi = 28.0 / 11.0;
      e.initial.C0 = {1.0, 0.0, 1.0};
      break;
    case 3:
      e.initial.C0 = {2.0, 0.5, 2.0};
      e.initial.rotation = true;
      break;
    default:
      throw ParameterError("unknown experiment id " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
  return e;
}

void rotation_velocity(const InitialConditionSpec& ic, double lx, double ly, double x, double y,
                       double& ux, double& uy) {
  ux = 0.0;
  uy = 0.0;
  if (!ic.rotation) return;
  const double xc = 0.5 * lx;
  const double yc = 0.5 * ly;
  const double r = ic.ball_radius_fraction * std::min(lx, ly);
  const double dx = x - xc;
  const double dy = y - yc;
  if (dx * dx + dy * dy <= r * r) {
    ux = dy / ly;
    uy = -dx / lx;
  }
}

}  // namespace vepsim
