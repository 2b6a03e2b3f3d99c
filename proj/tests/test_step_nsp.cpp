#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vepsim/assembly.hpp"
#include "vepsim/error.hpp"
#include "vepsim/step_nsp.hpp"

using namespace vepsim;

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double l2_norm2(const SparseMatrix& mass, const VectorField& u) {
  return bilinear(mass, u.x.values, u.x.values) + bilinear(mass, u.y.values, u.y.values);
}

double tensor_distance(const Tensor2& a, const Tensor2& b) {
  return std::max({std::abs(a.xx - b.xx), std::abs(a.xy - b.xy), std::abs(a.yy - b.yy)});
}

}  // namespace

TEST_CASE("uniform isotropic state: no flow, uniform scalar tensor update") {
  const Mesh m = build_rect_mesh(6, 6, 6.0, 6.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  const double c = std::numbers::sqrt2, dt = 0.1;
  const ScalarField phi(n, 0.4), mu(n, 0.0);
  const VectorField u(n);
  const TensorField C(n, {c, 0.0, c});
  Step2Settings s;
  s.tol_fp = 1e-13;
  s.max_fp = 200;
  s.solver.tol = 1e-13;
  Step2Solver solver(space, p, s);
  const Step2Result r = solver.advance(u, C, compute_feet(m, u, dt), dt, phi, phi, mu);
  const Tensor2 expect = conformation_equilibrium(Coefficients(p).h(0.4), dt, c, 1);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(r.u.x[i]) <= 1e-12);
    CHECK(std::abs(r.u.y[i]) <= 1e-12);
    CHECK(std::abs(r.p[i]) <= 1e-10);
    CHECK(tensor_distance(r.C.at(i), expect) <= 1e-9);
    CHECK(std::abs(r.C.xy[i]) <= 1e-12);
  }
  CHECK(r.fp_iterations >= 1);
  CHECK(r.fp_history.back() <= solver.settings().tol_fp);
}

TEST_CASE("scalar conformation relaxation reaches I/sqrt(2)") {
  const double h = Coefficients(experiment_preset(1).params).h(0.4);
  const Tensor2 target{kInvSqrt2, 0.0, kInvSqrt2};
  CHECK(tensor_distance(conformation_equilibrium(h, 0.1, std::numbers::sqrt2, 2000), target) <= 1e-6);
  CHECK(tensor_distance(conformation_equilibrium(h, 0.1, 1.0, 2000), target) <= 1e-6);
  CHECK(tensor_distance(conformation_equilibrium(h, 0.1, kInvSqrt2, 1), target) <= 1e-13);
  // The fixed point satisfies tr(C) I = tr(C)^2 C.
  const Tensor2 eq = conformation_equilibrium(h, 0.1, 2.0, 5000);
  CHECK(std::abs(eq.trace() - eq.trace() * eq.trace() * eq.xx) <= 1e-9);
}

TEST_CASE("stress-free flow loses kinetic energy") {
  const Mesh m = build_rect_mesh(8, 8, 1.0, 1.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  VectorField u(n);
  for (int i = 0; i < n; ++i) {
    if (m.is_boundary(i)) continue;
    const Point x = m.node(i);
    u.x[i] = std::sin(std::numbers::pi * x.x) * std::sin(2.0 * std::numbers::pi * x.y);
    u.y[i] = 0.5 * x.x * (1.0 - x.y);
  }
  const TensorField C(n, {0.0, 0.0, 0.0});
  const ScalarField phi(n, 0.4), mu(n, 0.0);
  const SparseMatrix mass = assemble_mass(space);
  Step2Solver solver(space, p);
  // Feet from zero velocity keep the transported velocity equal to u.
  const FootPoints feet = compute_feet(m, VectorField(n), 0.05);
  VectorField cur = u;
  for (int step = 0; step < 3; ++step) {
    const Step2Result r = solver.advance(cur, C, feet, 0.05, phi, phi, mu);
    CHECK(l2_norm2(mass, r.u) <= l2_norm2(mass, cur));
    for (double v : r.C.xx.values) CHECK(v == 0.0);
    for (int b : m.boundary_nodes()) {
      CHECK(r.u.x[b] == 0.0);
      CHECK(r.u.y[b] == 0.0);
    }
    cur = r.u;
  }
}

TEST_CASE("pressure has zero mean and velocity vanishes on the boundary") {
  const Mesh m = build_rect_mesh(8, 8, 8.0, 8.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  ScalarField phi(n), mu(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = 0.4 + noise(rng);
    mu[i] = noise(rng);
  }
  const VectorField u(n);
  const TensorField C(n, {std::numbers::sqrt2, 0.0, std::numbers::sqrt2});
  Step2Solver solver(space, p);
  const Step2Result r = solver.advance(u, C, compute_feet(m, u, 0.1), 0.1, phi, phi, mu);
  CHECK(std::abs(mean(m, r.p)) <= 1e-12);
  for (int b : m.boundary_nodes()) {
    CHECK(r.u.x[b] == 0.0);
    CHECK(r.u.y[b] == 0.0);
  }
  double umax = 0.0;
  for (int i = 0; i < n; ++i) umax = std::max(umax, std::abs(r.u.x[i]) + std::abs(r.u.y[i]));
  CHECK(umax > 0.0);
}

TEST_CASE("implicit and lagged coupling converge to the same step") {
  const Mesh m = build_rect_mesh(6, 6, 6.0, 6.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  ScalarField phi(n), mu(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = 0.4 + noise(rng);
    mu[i] = noise(rng);
  }
  const VectorField u(n);
  const TensorField C(n, {1.0, 0.1, 1.2});
  Step2Settings implicit_settings, lagged_settings;
  implicit_settings.tol_fp = lagged_settings.tol_fp = 1e-11;
  lagged_settings.stress_mode = StressMode::Lagged;
  lagged_settings.max_fp = 200;
  Step2Solver a(space, p, implicit_settings), b(space, p, lagged_settings);
  const FootPoints feet = compute_feet(m, u, 0.05);
  const Step2Result ra = a.advance(u, C, feet, 0.05, phi, phi, mu);
  const Step2Result rb = b.advance(u, C, feet, 0.05, phi, phi, mu);
  double du = 0.0, dc = 0.0;
  for (int i = 0; i < n; ++i) {
    du = std::max(du, std::abs(ra.u.x[i] - rb.u.x[i]) + std::abs(ra.u.y[i] - rb.u.y[i]));
    dc = std::max(dc, tensor_distance(ra.C.at(i), rb.C.at(i)));
  }
  CHECK(du <= 1e-8);
  CHECK(dc <= 1e-8);
}

TEST_CASE("Anderson mixing reaches the Picard fixed point in fewer iterations") {
  const Mesh m = build_rect_mesh(8, 8, 8.0, 8.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(3).params;
  const int n = m.num_nodes();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  ScalarField phi(n), mu(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = 0.4 + noise(rng);
    mu[i] = noise(rng);
  }
  const VectorField u(n);
  const TensorField C(n, {std::numbers::sqrt2, 0.0, std::numbers::sqrt2});
  Step2Settings picard, anderson;
  picard.tol_fp = anderson.tol_fp = 1e-12;
  picard.max_fp = 400;
  picard.anderson_depth = 0;
  Step2Solver a(space, p, picard), b(space, p, anderson);
  const FootPoints feet = compute_feet(m, u, 0.1);
  const Step2Result ra = a.advance(u, C, feet, 0.1, phi, phi, mu);
  const Step2Result rb = b.advance(u, C, feet, 0.1, phi, phi, mu);
  CHECK(rb.fp_iterations < ra.fp_iterations);
  double du = 0.0, dc = 0.0;
  for (int i = 0; i < n; ++i) {
    du = std::max(du, std::abs(ra.u.x[i] - rb.u.x[i]) + std::abs(ra.u.y[i] - rb.u.y[i]));
    dc = std::max(dc, tensor_distance(ra.C.at(i), rb.C.at(i)));
  }
  CHECK(du <= 1e-9);
  CHECK(dc <= 1e-9);
  MESSAGE("picard " << ra.fp_iterations << " anderson " << rb.fp_iterations);
}

TEST_CASE("frozen velocity advances only the tensor") {
  const Mesh m = build_rect_mesh(5, 5, 5.0, 5.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  Step2Settings s;
  s.freeze_velocity = true;
  Step2Solver solver(space, p, s);
  const VectorField u(n);
  const TensorField C(n, {std::numbers::sqrt2, 0.0, std::numbers::sqrt2});
  const ScalarField phi(n, 0.4), mu(n, 0.3);
  const Step2Result r = solver.advance(u, C, compute_feet(m, u, 0.1), 0.1, phi, phi, mu);
  for (int i = 0; i < n; ++i) {
    CHECK(r.u.x[i] == 0.0);
    CHECK(r.u.y[i] == 0.0);
    CHECK(r.p[i] == 0.0);
    CHECK(r.C.xx[i] < std::numbers::sqrt2);
  }
}

TEST_CASE("inner iteration failure is reported") {
  const Mesh m = build_rect_mesh(4, 4, 4.0, 4.0);
  const P1Space space(m);
  const ModelParams p = experiment_preset(1).params;
  const int n = m.num_nodes();
  Step2Settings s;
  s.max_fp = 1;
  s.tol_fp = 1e-15;
  Step2Solver solver(space, p, s);
  const VectorField u(n);
  const TensorField C(n, {std::numbers::sqrt2, 0.0, std::numbers::sqrt2});
  const ScalarField phi(n, 0.4), mu(n, 0.0);
  CHECK_THROWS_AS(solver.advance(u, C, compute_feet(m, u, 0.1), 0.1, phi, phi, mu), SolverError);
}

TEST_CASE("stress mode names") {
  CHECK(parse_stress_mode("implicit") == StressMode::Implicit);
  CHECK(parse_stress_mode("lagged") == StressMode::Lagged);
  CHECK(parse_stress_mode(to_string(StressMode::Lagged)) == StressMode::Lagged);
  CHECK_THROWS(parse_stress_mode("explicit"));
}
