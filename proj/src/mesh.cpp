#include "vepsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vepsim/error.hpp"

namespace vepsim {

double Mesh::element_diameter() const { return std::hypot(hx(), hy()); }

ElementGeometry triangle_geometry(const Point& a, const Point& b, const Point& c) {
  ElementGeometry g;
  const double twice_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  g.area = 0.5 * twice_area;
  const std::array<const Point*, 3> v{&a, &b, &c};
  for (int i = 0; i < 3; ++i) {
    const Point& pj = *v[(i + 1) % 3];
    const Point& pk = *v[(i + 2) % 3];
    g.grad_bary[i] = {(pj.y - pk.y) / twice_area, (pk.x - pj.x) / twice_area};
  }
  return g;
}

Mesh build_rect_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1) {
    throw ParameterError("build_rect_mesh: cell counts must be >= 1, got " + std::to_string(nx) +
                         "x" + std::to_string(ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw ParameterError("build_rect_mesh: side lengths must be positive and finite");
  }
  Mesh m;
  m.nx_ = nx;
  m.ny_ = ny;
  m.lx_ = lx;
  m.ly_ = ly;
  m.nodes_.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  m.on_boundary_.assign(static_cast<size_t>(nx + 1) * (ny + 1), 0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? lx : lx * i / nx;
      const double y = (j == ny) ? ly : ly * j / ny;
      m.nodes_.push_back({x, y});
      if (i == 0 || i == nx || j == 0 || j == ny) {
        const int id = m.node_index(i, j);
        m.on_boundary_[id] = 1;
        m.boundary_nodes_.push_back(id);
      }
    }
  }
  m.elements_.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = m.node_index(i, j);
      const int v10 = m.node_index(i + 1, j);
      const int v01 = m.node_index(i, j + 1);
      const int v11 = m.node_index(i + 1, j + 1);
      m.elements_.push_back({v00, v10, v11});
      m.elements_.push_back({v00, v11, v01});
    }
  }
  m.geometry_.reserve(m.elements_.size());
  for (const Triangle& t : m.elements_) {
    m.geometry_.push_back(triangle_geometry(m.nodes_[t[0]], m.nodes_[t[1]], m.nodes_[t[2]]));
  }
  return m;
}

ElementGeometry element_geometry(const Mesh& mesh, int e) {
  if (e < 0 || e >= mesh.num_elements()) {
    throw DomainError("element_geometry: element index " + std::to_string(e) + " out of range");
  }
  return mesh.geometry(e);
}

Location locate_point(const Mesh& mesh, const Point& x) {
  if (!(x.x >= 0.0 && x.x <= mesh.lx() && x.y >= 0.0 && x.y <= mesh.ly())) {
    throw DomainError("locate_point: point outside the domain");
  }
  const double sx = x.x / mesh.hx();
  const double sy = x.y / mesh.hy();
  const int i = std::min(static_cast<int>(sx), mesh.nx() - 1);
  const int j = std::min(static_cast<int>(sy), mesh.ny() - 1);
  const double xi = std::clamp(sx - i, 0.0, 1.0);
  const double eta = std::clamp(sy - j, 0.0, 1.0);
  const int cell = j * mesh.nx() + i;
  Location loc;
  if (eta <= xi) {
    loc.element = 2 * cell;
    loc.bary = {1.0 - xi, xi - eta, eta};
  } else {
    loc.element = 2 * cell + 1;
    loc.bary = {1.0 - eta, xi, eta - xi};
  }
  return loc;
}

Location node_location(const Mesh& mesh, int node) {
  if (node < 0 || node >= mesh.num_nodes()) {
    throw DomainError("node_location: node index " + std::to_string(node) + " out of range");
  }
  const int stride = mesh.nx() + 1;
  const int i = node % stride;
  const int j = node / stride;
  // Lower triangle of the cell whose v00 is the node, falling back to the
  // neighbouring cells on the top/right boundary.
  const int ci = std::min(i, mesh.nx() - 1);
  const int cj = std::min(j, mesh.ny() - 1);
  Location loc;
  loc.element = 2 * (cj * mesh.nx() + ci);
  const Triangle& t = mesh.element(loc.element);
  if (t[0] == node) {
    loc.bary = {1.0, 0.0, 0.0};
    return loc;
  }
  if (t[1] == node) {
    loc.bary = {0.0, 1.0, 0.0};
    return loc;
  }
  if (t[2] == node) {
    loc.bary = {0.0, 0.0, 1.0};
    return loc;
  }
  // Top boundary node left of the corner: it is v01 of the cell below, which
  // only the upper triangle contains.
  loc.element += 1;
  loc.bary = {0.0, 0.0, 1.0};
  return loc;
}

Point bary_to_point(const Mesh& mesh, int e, const Barycentric& bary) {
  const Triangle& t = mesh.element(e);
  Point p;
  for (int k = 0; k < 3; ++k) {
    p.x += bary[k] * mesh.node(t[k]).x;
    p.y += bary[k] * mesh.node(t[k]).y;
  }
  return p;
}

}  // namespace vepsim
