#pragma once

#include <vector>

#include "vepsim/fields.hpp"
#include "vepsim/mesh.hpp"

namespace vepsim {

/// Upstream positions X(x_i) = x_i - u(x_i) dt of every node, clamped to the
/// closed domain, together with their mesh locations.
struct FootPoints {
  std::vector<Point> feet;
  std::vector<Location> locations;
  /// max |u| dt / h over the nodes (h = smaller cell side).
  double cfl = 0.0;
};

/// Throws ParameterError unless dt > 0.
FootPoints compute_feet(const Mesh& mesh, const VectorField& u, double dt);

/// Nodal Lagrange-Galerkin transport: value i of the result is the P1
/// interpolant of `f` at foot i.
ScalarField transport(const Mesh& mesh, const ScalarField& f, const FootPoints& feet);
VectorField transport(const Mesh& mesh, const VectorField& f, const FootPoints& feet);
TensorField transport(const Mesh& mesh, const TensorField& f, const FootPoints& feet);

}  // namespace vepsim
