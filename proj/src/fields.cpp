#include "vepsim/fields.hpp"

#include <algorithm>

namespace vepsim {

double eval_at(const Mesh& mesh, const ScalarField& f, int e, const Barycentric& bary) {
  const Triangle& t = mesh.element(e);
  return bary[0] * f[t[0]] + bary[1] * f[t[1]] + bary[2] * f[t[2]];
}

Vec2 eval_at(const Mesh& mesh, const VectorField& f, int e, const Barycentric& bary) {
  return {eval_at(mesh, f.x, e, bary), eval_at(mesh, f.y, e, bary)};
}

Tensor2 eval_at(const Mesh& mesh, const TensorField& f, int e, const Barycentric& bary) {
  return {eval_at(mesh, f.xx, e, bary), eval_at(mesh, f.xy, e, bary),
          eval_at(mesh, f.yy, e, bary)};
}

double integrate(const Mesh& mesh, const ScalarField& f) {
  return integrate(mesh, [&](const QuadPoint& qp) { return eval_at(mesh, f, qp.element, qp.bary); });
}

double mean(const Mesh& mesh, const ScalarField& f) { return integrate(mesh, f) / mesh.domain_area(); }

std::pair<double, double> minmax(const ScalarField& f) {
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  return {*lo, *hi};
}

double variance(const Mesh& mesh, const ScalarField& f) {
  const double m = mean(mesh, f);
  return integrate(mesh, [&](const QuadPoint& qp) {
           const double d = eval_at(mesh, f, qp.element, qp.bary) - m;
           return d * d;
         }) /
         mesh.domain_area();
}

Vec2 element_gradient(const Mesh& mesh, const ScalarField& f, int e) {
  const Triangle& t = mesh.element(e);
  const ElementGeometry& g = mesh.geometry(e);
  Vec2 grad;
  for (int k = 0; k < 3; ++k) {
    grad.x += f[t[k]] * g.grad_bary[k].x;
    grad.y += f[t[k]] * g.grad_bary[k].y;
  }
  return grad;
}

}  // namespace vepsim
