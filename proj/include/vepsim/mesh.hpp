#pragma once

#include <array>
#include <span>
#include <vector>

namespace vepsim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Vec2 = Point;
using Triangle = std::array<int, 3>;
using Barycentric = std::array<double, 3>;

/// Constant P1 data of one triangle.
struct ElementGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_bary{};
};

/// Result of a point location: containing element and barycentric
/// coordinates relative to that element's vertex order.
struct Location {
  int element = 0;
  Barycentric bary{1.0, 0.0, 0.0};
};

/// Uniform right-triangle mesh of [0,Lx]x[0,Ly].
///
/// Nodes are numbered row-major with x fastest. Cell (i,j) is split along
/// its lower-left to upper-right diagonal; element 2*(j*nx+i) is the lower
/// triangle (v00,v10,v11), element 2*(j*nx+i)+1 the upper one (v00,v11,v01).
/// Immutable after construction.
class Mesh {
 public:
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  /// Diameter of every element (length of the cell diagonal).
  double element_diameter() const;
  double domain_area() const { return lx_ * ly_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }

  std::span<const Point> nodes() const { return nodes_; }
  std::span<const Triangle> elements() const { return elements_; }
  std::span<const int> boundary_nodes() const { return boundary_nodes_; }
  bool is_boundary(int node) const { return on_boundary_[node] != 0; }

  const Point& node(int i) const { return nodes_[i]; }
  const Triangle& element(int e) const { return elements_[e]; }
  /// Unchecked variant of element_geometry() for inner loops.
  const ElementGeometry& geometry(int e) const { return geometry_[e]; }

 private:
  friend Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

  int nx_ = 0;
  int ny_ = 0;
  double lx_ = 0.0;
  double ly_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<Triangle> elements_;
  std::vector<ElementGeometry> geometry_;
  std::vector<int> boundary_nodes_;
  std::vector<char> on_boundary_;
};

/// Throws ParameterError for non-positive counts or lengths.
Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

/// Geometry of a triangle given by its three vertices (counter-clockwise).
ElementGeometry triangle_geometry(const Point& a, const Point& b, const Point& c);

/// Throws DomainError when `e` is out of range.
ElementGeometry element_geometry(const Mesh& mesh, int e);

/// O(1) point location. Points exactly on a cell diagonal belong to the lower
/// triangle. Throws DomainError for points outside the closed domain.
Location locate_point(const Mesh& mesh, const Point& x);

/// Exact location of a mesh node: an element incident to it with barycentric
/// coordinates (1,0,0) up to permutation.
Location node_location(const Mesh& mesh, int node);

/// Physical coordinates of a barycentric point of element `e`.
Point bary_to_point(const Mesh& mesh, int e, const Barycentric& bary);

}  // namespace vepsim
