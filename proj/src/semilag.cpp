#include "vepsim/semilag.hpp"

#include <algorithm>
#include <cmath>

#include "vepsim/error.hpp"

namespace vepsim {

FootPoints compute_feet(const Mesh& mesh, const VectorField& u, double dt) {
  if (!(dt > 0.0)) throw ParameterError("compute_feet: dt must be positive");
  const int n = mesh.num_nodes();
  FootPoints fp;
  fp.feet.resize(n);
  fp.locations.resize(n);
  double umax = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& x = mesh.node(i);
    const double ux = u.x[i];
    const double uy = u.y[i];
    umax = std::max(umax, std::hypot(ux, uy));
    if (ux == 0.0 && uy == 0.0) {
      // Stationary node: keep the exact nodal location so transport is the
      // identity bit for bit.
      fp.feet[i] = x;
      fp.locations[i] = node_location(mesh, i);
      continue;
    }
    Point foot{std::clamp(x.x - ux * dt, 0.0, mesh.lx()), std::clamp(x.y - uy * dt, 0.0, mesh.ly())};
    fp.feet[i] = foot;
    fp.locations[i] = locate_point(mesh, foot);
  }
  fp.cfl = umax * dt / std::min(mesh.hx(), mesh.hy());
  return fp;
}

ScalarField transport(const Mesh& mesh, const ScalarField& f, const FootPoints& feet) {
  ScalarField out(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const Location& loc = feet.locations[i];
    const Triangle& t = mesh.element(loc.element);
    if (loc.bary[0] == 1.0) {
      out[i] = f[t[0]];
    } else if (loc.bary[1] == 1.0) {
      out[i] = f[t[1]];
    } else if (loc.bary[2] == 1.0) {
      out[i] = f[t[2]];
    } else {
      out[i] = eval_at(mesh, f, loc.element, loc.bary);
    }
  }
  return out;
}

VectorField transport(const Mesh& mesh, const VectorField& f, const FootPoints& feet) {
  VectorField out;
  out.x = transport(mesh, f.x, feet);
  out.y = transport(mesh, f.y, feet);
  return out;
}

TensorField transport(const Mesh& mesh, const TensorField& f, const FootPoints& feet) {
  TensorField out;
  out.xx = transport(mesh, f.xx, feet);
  out.xy = transport(mesh, f.xy, feet);
  out.yy = transport(mesh, f.yy, feet);
  return out;
}

}  // namespace vepsim
