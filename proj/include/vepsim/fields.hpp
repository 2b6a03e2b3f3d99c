#pragma once

#include <array>
#include <concepts>
#include <span>
#include <utility>
#include <vector>

#include "vepsim/mesh.hpp"
#include "vepsim/model.hpp"

namespace vepsim {

/// Nodal values of a continuous P1 function.
struct ScalarField {
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(int n, double v = 0.0) : values(static_cast<size_t>(n), v) {}
  explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  operator std::span<const double>() const { return values; }
  bool operator==(const ScalarField&) const = default;
};

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  explicit VectorField(int n) : x(n), y(n) {}
  int size() const { return x.size(); }
  bool operator==(const VectorField&) const = default;
};

/// Symmetric tensor field; the off-diagonal is stored once.
struct TensorField {
  ScalarField xx;
  ScalarField xy;
  ScalarField yy;

  TensorField() = default;
  explicit TensorField(int n, Tensor2 c = {}) : xx(n, c.xx), xy(n, c.xy), yy(n, c.yy) {}
  int size() const { return xx.size(); }
  Tensor2 at(int i) const { return {xx[i], xy[i], yy[i]}; }
  void set(int i, const Tensor2& c) {
    xx[i] = c.xx;
    xy[i] = c.xy;
    yy[i] = c.yy;
  }
  bool operator==(const TensorField&) const = default;
};

double eval_at(const Mesh& mesh, const ScalarField& f, int e, const Barycentric& bary);
Vec2 eval_at(const Mesh& mesh, const VectorField& f, int e, const Barycentric& bary);
Tensor2 eval_at(const Mesh& mesh, const TensorField& f, int e, const Barycentric& bary);

/// Nodal values of an analytic function.
template <class F>
ScalarField interpolate(const Mesh& mesh, F&& fn) {
  ScalarField out(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) out[i] = fn(mesh.node(i));
  return out;
}

/// Quadrature point of the three-point edge-midpoint rule.
struct QuadPoint {
  int element = 0;
  int local = 0;  // 0..2, midpoint of the edge opposite vertex `local`
  Barycentric bary{};
  Point x;
  double weight = 0.0;
};

/// Barycentric coordinates of midpoint `q` (opposite vertex q).
constexpr Barycentric midpoint_bary(int q) {
  Barycentric b{0.5, 0.5, 0.5};
  b[q] = 0.0;
  return b;
}

/// Sum over elements and midpoints of weight * integrand(qp), in element
/// order. Exact for polynomials of degree <= 2.
template <class F>
  requires std::invocable<F&, const QuadPoint&>
double integrate(const Mesh& mesh, F&& integrand) {
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double w = mesh.geometry(e).area / 3.0;
    double local_sum = 0.0;
    for (int q = 0; q < 3; ++q) {
      QuadPoint qp;
      qp.element = e;
      qp.local = q;
      qp.bary = midpoint_bary(q);
      qp.x = bary_to_point(mesh, e, qp.bary);
      qp.weight = w;
      local_sum += integrand(qp);
    }
    total += w * local_sum;
  }
  return total;
}

double integrate(const Mesh& mesh, const ScalarField& f);
double mean(const Mesh& mesh, const ScalarField& f);
std::pair<double, double> minmax(const ScalarField& f);
/// Domain average of (f - mean)^2.
double variance(const Mesh& mesh, const ScalarField& f);

/// Constant gradient of a P1 field on element e.
Vec2 element_gradient(const Mesh& mesh, const ScalarField& f, int e);

}  // namespace vepsim
