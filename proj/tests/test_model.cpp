#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vepsim/error.hpp"
#include "vepsim/model.hpp"

using namespace vepsim;

namespace {

ModelParams with_potential(PotentialKind kind) {
  ModelParams p;
  p.potential.kind = kind;
  return p;
}

}  // namespace

TEST_CASE("coefficient closures at sample points") {
  const ModelParams p = experiment_preset(1).params;
  const Coefficients c(p);
  CHECK(c.A(0.4) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(c.m(0.5) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(c.n(0.5) == doctest::Approx(0.25));
  CHECK(c.tau(0.5) == doctest::Approx(2.5));
  CHECK(c.h(0.5) == doctest::Approx(0.8));
  CHECK(c.eta(0.5) == doctest::Approx(0.75));
  // A switches between 1 and 2 across phi*.
  CHECK(c.A(0.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.A(0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("clamped coefficients stay finite near the pure phases") {
  const ModelParams p = experiment_preset(1).params;
  const Coefficients c(p);
  CHECK(c.h(0.0) == doctest::Approx(c.h(p.clamp_lower)));
  CHECK(c.h(-0.3) == doctest::Approx(c.h(p.clamp_lower)));
  CHECK(std::isfinite(c.h(0.0)));
  CHECK(c.tau(0.0) > 0.0);
  CHECK(std::isfinite(c.A(0.0)));
  CHECK(std::isfinite(c.A(1.0)));
  CHECK(c.eta(1.0) == doctest::Approx(p.eta_min));
  CHECK(c.eta(1.5) == doctest::Approx(p.eta_min));
  CHECK(c.m(-0.2) >= 0.0);
  CHECK(c.n(1.2) >= 0.0);
}

TEST_CASE("coefficient overrides replace the closures") {
  ModelParams p = experiment_preset(1).params;
  p.overrides.m = 1.0;
  p.overrides.n = 0.0;
  const Coefficients c(p);
  for (double phi : {0.1, 0.4, 0.9}) {
    CHECK(c.m(phi) == 1.0);
    CHECK(c.n(phi) == 0.0);
    CHECK(c.eval(Coefficient::Mobility, phi) == 1.0);
  }
}

TEST_CASE("dA matches a difference quotient") {
  const Coefficients c(experiment_preset(1).params);
  for (double phi : {0.2, 0.3995, 0.4003, 0.6}) {
    const double h = 1e-7;
    const double fd = (c.A(phi + h) - c.A(phi - h)) / (2 * h);
    CHECK(c.dA(phi) == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("potential values") {
  const ModelParams mgl = experiment_preset(1).params;
  const double a = 0.134791, b = 1.0 - a;
  CHECK(mgl.potential.well_a == a);
  CHECK(mgl.potential.well_b == b);
  CHECK(std::abs(potential_F(mgl, a)) < 1e-15);
  CHECK(std::abs(potential_F(mgl, b)) < 1e-15);
  CHECK(std::abs(potential_f(mgl, a)) < 1e-15);
  CHECK(potential_fprime(mgl, a) == doctest::Approx(2.0 * (a - b) * (a - b)));

  ModelParams gl = with_potential(PotentialKind::GinzburgLandau);
  gl.potential.gl_a = 1.0;
  CHECK(potential_F(gl, 0.5) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(potential_fprime(gl, 0.0) == doctest::Approx(2.0));

  ModelParams fh = experiment_preset(2).params;
  CHECK(fh.potential.kind == PotentialKind::FloryHuggins);
  CHECK(fh.potential.chi == doctest::Approx(28.0 / 11.0));
  CHECK(potential_F(fh, 0.5) == doctest::Approx(std::log(0.5) + 7.0 / 11.0).epsilon(1e-14));
  CHECK(potential_F(fh, 0.5) == doctest::Approx(-0.056786).epsilon(1e-5));
}

TEST_CASE("derivatives are consistent for all potentials") {
  for (PotentialKind k : {PotentialKind::GinzburgLandau, PotentialKind::ModifiedGinzburgLandau,
                          PotentialKind::FloryHuggins}) {
    const ModelParams p = with_potential(k);
    for (double phi = 0.05; phi <= 0.95; phi += 0.01) {
      const double h = 1e-5;
      const double df = (potential_F(p, phi + h) - potential_F(p, phi - h)) / (2 * h);
      const double dfp = (potential_f(p, phi + h) - potential_f(p, phi - h)) / (2 * h);
      CHECK(std::abs(df - potential_f(p, phi)) <= 1e-6 * (1.0 + std::abs(potential_f(p, phi))));
      CHECK(std::abs(dfp - potential_fprime(p, phi)) <=
            1e-6 * (1.0 + std::abs(potential_fprime(p, phi))));
    }
  }
}

TEST_CASE("Flory-Huggins potential is finite outside (0,1)") {
  const ModelParams fh = with_potential(PotentialKind::FloryHuggins);
  for (double phi : {-0.1, 0.0, 1.0, 1.1}) {
    CHECK(std::isfinite(potential_F(fh, phi)));
    CHECK(std::isfinite(potential_f(fh, phi)));
    CHECK(std::isfinite(potential_fprime(fh, phi)));
  }
}

TEST_CASE("linearly implicit Taylor term") {
  const ModelParams mgl = experiment_preset(1).params;
  for (double phi : {0.1, 0.4, 0.77}) CHECK(f_taylor(mgl, phi, phi) == potential_f(mgl, phi));
  const double a = mgl.potential.well_a, b = mgl.potential.well_b;
  CHECK(f_taylor(mgl, a, 0.5) == doctest::Approx(0.5 * (0.5 - a) * 2.0 * (a - b) * (a - b)));

  ModelParams gl = with_potential(PotentialKind::GinzburgLandau);
  gl.potential.gl_a = 1.0;
  CHECK(f_taylor(gl, 0.0, 1.0) == doctest::Approx(1.0));
  // Affine in the new value.
  const double f0 = f_taylor(mgl, 0.3, 0.0), f1 = f_taylor(mgl, 0.3, 1.0);
  CHECK(f_taylor(mgl, 0.3, 0.25) == doctest::Approx(f0 + 0.25 * (f1 - f0)));
}

TEST_CASE("experiment presets") {
  const ExperimentPreset e1 = experiment_preset(1);
  CHECK(e1.params.potential.kind == PotentialKind::ModifiedGinzburgLandau);
  CHECK(e1.initial.C0.xx == doctest::Approx(std::numbers::sqrt2));
  CHECK(e1.initial.C0.yy == doctest::Approx(std::numbers::sqrt2));
  CHECK(e1.initial.C0.xy == 0.0);
  CHECK(e1.initial.phi_mean == 0.4);
  CHECK(e1.initial.noise_amplitude == 1e-3);
  CHECK(e1.params.phi_star == 0.4);
  CHECK_FALSE(e1.initial.rotation);

  const ExperimentPreset e2 = experiment_preset(2);
  CHECK(e2.initial.C0.xx == 1.0);
  CHECK(e2.initial.C0.yy == 1.0);
  CHECK(e2.params.potential.n_p == 1.0);
  CHECK(e2.params.potential.n_s == 1.0);

  const ExperimentPreset e3 = experiment_preset(3);
  CHECK(e3.initial.rotation);
  CHECK(e3.initial.C0.xx == 2.0);
  CHECK(e3.initial.C0.xy == 0.5);
  double ux = 0.0, uy = 0.0;
  rotation_velocity(e3.initial, 128.0, 128.0, 64.0, 114.0, ux, uy);
  CHECK(ux == doctest::Approx(50.0 / 128.0));
  CHECK(uy == doctest::Approx(0.0));
  rotation_velocity(e3.initial, 128.0, 128.0, 120.0, 120.0, ux, uy);
  CHECK(ux == 0.0);
  CHECK(uy == 0.0);

  CHECK_THROWS_AS(experiment_preset(0), ParameterError);
  CHECK_THROWS_AS(experiment_preset(4), ParameterError);
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(validate(p));
  p.kappa = 1.5;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = ModelParams{};
  p.delta0 = -1.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = ModelParams{};
  p.c0 = 0.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
}

TEST_CASE("potential names round trip") {
  for (PotentialKind k : {PotentialKind::GinzburgLandau, PotentialKind::ModifiedGinzburgLandau,
                          PotentialKind::FloryHuggins})
    CHECK(parse_potential_kind(to_string(k)) == k);
  CHECK_THROWS(parse_potential_kind("quartic"));
}

TEST_CASE("tensor helpers") {
  const Tensor2 c{2.0, 0.5, 3.0};
  CHECK(c.trace() == 5.0);
  CHECK(c.det() == 5.75);
}
