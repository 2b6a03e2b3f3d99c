#include "vepsim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vepsim/fields.hpp"
#include "vepsim/step_nsp.hpp"

namespace vepsim {

TraceNormReport check_trace_norm_inequality(const Mesh& mesh, int samples, int p,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double d = 2.0;
  TraceNormReport rep;
  rep.samples = samples;
  for (int s = 0; s < samples; ++s) {
    TensorField D(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) D.set(i, {dist(rng), dist(rng), dist(rng)});
    const double lhs = integrate(mesh, [&](const QuadPoint& qp) {
      return std::pow(std::abs(eval_at(mesh, D, qp.element, qp.bary).trace()), p);
    });
    const double rhs = std::pow(d, p - 1) * integrate(mesh, [&](const QuadPoint& qp) {
                         const Tensor2 c = eval_at(mesh, D, qp.element, qp.bary);
                         return std::pow(std::abs(c.xx), p) + 2.0 * std::pow(std::abs(c.xy), p) +
                                std::pow(std::abs(c.yy), p);
                       });
    if (lhs > rhs * (1.0 + 1e-14)) ++rep.violations;
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
  }
  return rep;
}

std::vector<StreamFunction> korn_stream_functions() {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  constexpr double pi2 = pi * pi;
  std::vector<StreamFunction> out;
  out.push_back({"sin(pi x) sin(pi y)",
                 [](double x, double y) { return pi * cos(pi * x) * sin(pi * y); },
                 [](double x, double y) { return pi * sin(pi * x) * cos(pi * y); },
                 [](double x, double y) { return -pi2 * sin(pi * x) * sin(pi * y); },
                 [](double x, double y) { return pi2 * cos(pi * x) * cos(pi * y); },
                 [](double x, double y) { return -pi2 * sin(pi * x) * sin(pi * y); }});
  out.push_back({"sin(2 pi x) sin(pi y)",
                 [](double x, double y) { return 2 * pi * cos(2 * pi * x) * sin(pi * y); },
                 [](double x, double y) { return pi * sin(2 * pi * x) * cos(pi * y); },
                 [](double x, double y) { return -4 * pi2 * sin(2 * pi * x) * sin(pi * y); },
                 [](double x, double y) { return 2 * pi2 * cos(2 * pi * x) * cos(pi * y); },
                 [](double x, double y) { return -pi2 * sin(2 * pi * x) * sin(pi * y); }});
  out.push_back({"sin^2(pi x) sin^2(pi y)",
                 [](double x, double y) { return pi * sin(2 * pi * x) * sin(pi * y) * sin(pi * y); },
                 [](double x, double y) { return pi * sin(pi * x) * sin(pi * x) * sin(2 * pi * y); },
                 [](double x, double y) {
                   return 2 * pi2 * cos(2 * pi * x) * sin(pi * y) * sin(pi * y);
                 },
                 [](double x, double y) { return pi2 * sin(2 * pi * x) * sin(2 * pi * y); },
                 [](double x, double y) {
                   return 2 * pi2 * sin(pi * x) * sin(pi * x) * cos(2 * pi * y);
                 }});
  return out;
}

KornReport check_korn_equality(const Mesh& mesh, const std::function<double(double, double)>& ux,
                               const std::function<double(double, double)>& uy) {
  const ScalarField fx = interpolate(mesh, [&](const Point& p) { return ux(p.x, p.y); });
  const ScalarField fy = interpolate(mesh, [&](const Point& p) { return uy(p.x, p.y); });
  KornReport r;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 gx = element_gradient(mesh, fx, e);
    const Vec2 gy = element_gradient(mesh, fy, e);
    const double area = mesh.geometry(e).area;
    const double off = 0.5 * (gx.y + gy.x);
    r.grad_norm2 += area * (gx.x * gx.x + gx.y * gx.y + gy.x * gy.x + gy.y * gy.y);
    r.sym_norm2 += 2.0 * area * (gx.x * gx.x + gy.y * gy.y + 2.0 * off * off);
  }
  return r;
}

KornReport check_korn_equality(const Mesh& mesh, const StreamFunction& sf) {
  // grad u = [[psi_xy, psi_yy], [-psi_xx, -psi_xy]] for u = (psi_y, -psi_x).
  KornReport r;
  r.grad_norm2 = integrate(mesh, [&](const QuadPoint& q) {
    const double a = sf.psi_xy(q.x.x, q.x.y), b = sf.psi_yy(q.x.x, q.x.y);
    const double c = sf.psi_xx(q.x.x, q.x.y);
    return 2.0 * a * a + b * b + c * c;
  });
  r.sym_norm2 = integrate(mesh, [&](const QuadPoint& q) {
    const double a = sf.psi_xy(q.x.x, q.x.y);
    const double off = 0.5 * (sf.psi_yy(q.x.x, q.x.y) - sf.psi_xx(q.x.x, q.x.y));
    return 2.0 * (2.0 * a * a + 2.0 * off * off);
  });
  return r;
}

GradientCheckReport check_potential_gradients(const ModelParams& params) {
  GradientCheckReport r;
  const double h = 1e-5;
  for (int k = 0; k <= 900; ++k) {
    const double x = 0.05 + 0.001 * k;
    const double f = potential_f(params, x);
    const double fp = potential_fprime(params, x);
    const double fd_f = (potential_F(params, x + h) - potential_F(params, x - h)) / (2 * h);
    const double fd_fp = (potential_f(params, x + h) - potential_f(params, x - h)) / (2 * h);
    r.max_rel_error_f = std::max(r.max_rel_error_f, std::abs(fd_f - f) / (1.0 + std::abs(f)));
    r.max_rel_error_fprime =
        std::max(r.max_rel_error_fprime, std::abs(fd_fp - fp) / (1.0 + std::abs(fp)));
  }
  return r;
}

std::vector<CheckReport> run_property_checks() {
  std::vector<CheckReport> out;
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
  };

  const Mesh unit4 = build_rect_mesh(4, 4, 1.0, 1.0);
  for (int p : {2, 4}) {
    const TraceNormReport t = check_trace_norm_inequality(unit4, 1000, p, 12345u + p);
    out.push_back({"trace-norm inequality p=" + std::to_string(p), t.violations == 0,
                   std::to_string(t.violations) + " violations in " + std::to_string(t.samples) +
                       " samples, max ratio " + fmt(t.max_ratio)});
  }

  // Quadrature error envelope: 1e-3 at h = 1/64, scaling like h^2.
  for (const StreamFunction& sf : korn_stream_functions()) {
    double worst = 0.0, at64 = 0.0;
    for (int n : {16, 32, 64}) {
      const double d = std::abs(check_korn_equality(build_rect_mesh(n, n, 1.0, 1.0), sf).difference());
      const double bound = 1e-3 * (64.0 / n) * (64.0 / n);
      worst = std::max(worst, d / bound);
      if (n == 64) at64 = d;
    }
    out.push_back({"Korn equality " + sf.name, worst <= 1.0,
                   "|diff| at h=1/64 " + fmt(at64) + ", max share of the h^2 bound " + fmt(worst)});
  }

  for (PotentialKind kind : {PotentialKind::GinzburgLandau, PotentialKind::ModifiedGinzburgLandau,
                             PotentialKind::FloryHuggins}) {
    ModelParams mp;
    mp.potential.kind = kind;
    const GradientCheckReport g = check_potential_gradients(mp);
    const bool ok = g.max_rel_error_f <= 1e-6 && g.max_rel_error_fprime <= 1e-6;
    out.push_back({"potential gradients " + to_string(kind), ok,
                   "max rel error F' " + fmt(g.max_rel_error_f) + ", F'' " +
                       fmt(g.max_rel_error_fprime)});
  }

  const ModelParams mp;
  const double h_val = Coefficients(mp).h(0.4);
  for (double c0 : {std::numbers::sqrt2, 1.0}) {
    const Tensor2 c = conformation_equilibrium(h_val, 0.1, c0, 2000);
    const double target = 1.0 / std::numbers::sqrt2;
    const double err =
        std::max({std::abs(c.xx - target), std::abs(c.xy), std::abs(c.yy - target)});
    out.push_back({"conformation equilibrium from " + fmt(c0) + " I", err <= 1e-6,
                   "max deviation from I/sqrt(2) " + fmt(err)});
  }
  return out;
}

}  // namespace vepsim
