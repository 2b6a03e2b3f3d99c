#include <doctest.h>

#include <cmath>
#include <random>
#include <map>
#include <set>

#include "vepsim/error.hpp"
#include "vepsim/mesh.hpp"

using namespace vepsim;

TEST_CASE("smallest mesh has four boundary nodes and two elements") {
  const Mesh m = build_rect_mesh(1, 1, 1.0, 1.0);
  CHECK(m.num_nodes() == 4);
  CHECK(m.num_elements() == 2);
  CHECK(m.boundary_nodes().size() == 4);
}

TEST_CASE("128 by 128 cells give 129^2 nodes and 2*128^2 elements") {
  const Mesh m = build_rect_mesh(128, 128, 128.0, 128.0);
  CHECK(m.num_nodes() == 129 * 129);
  CHECK(m.num_elements() == 2 * 128 * 128);
}

TEST_CASE("2x1 grid: six nodes, four elements of half a unit cell each") {
  const Mesh m = build_rect_mesh(2, 1, 2.0, 1.0);
  CHECK(m.num_nodes() == 6);
  REQUIRE(m.num_elements() == 4);
  // Unit cells split in two.
  for (int e = 0; e < 4; ++e) CHECK(element_geometry(m, e).area == doctest::Approx(0.5).epsilon(1e-15));
  const Mesh unit = build_rect_mesh(2, 1, 1.0, 1.0);
  for (int e = 0; e < 4; ++e) CHECK(element_geometry(unit, e).area == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("invalid mesh parameters are rejected") {
  CHECK_THROWS_AS(build_rect_mesh(0, 1, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(build_rect_mesh(1, -2, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(build_rect_mesh(1, 1, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(build_rect_mesh(1, 1, 1.0, -1.0), ParameterError);
}

TEST_CASE("reference triangle geometry") {
  const ElementGeometry g = triangle_geometry({0, 0}, {1, 0}, {0, 1});
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.grad_bary[0].x == doctest::Approx(-1.0));
  CHECK(g.grad_bary[0].y == doctest::Approx(-1.0));
  CHECK(g.grad_bary[1].x == doctest::Approx(1.0));
  CHECK(g.grad_bary[1].y == doctest::Approx(0.0));
  CHECK(g.grad_bary[2].x == doctest::Approx(0.0));
  CHECK(g.grad_bary[2].y == doctest::Approx(1.0));
}

TEST_CASE("element geometry invariants on a 4x4 unit mesh") {
  const Mesh m = build_rect_mesh(4, 4, 1.0, 1.0);
  double total = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(m, e);
    CHECK(g.area == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    const double sx = g.grad_bary[0].x + g.grad_bary[1].x + g.grad_bary[2].x;
    const double sy = g.grad_bary[0].y + g.grad_bary[1].y + g.grad_bary[2].y;
    CHECK(std::abs(sx) < 1e-13);
    CHECK(std::abs(sy) < 1e-13);
    // Counter-clockwise orientation: positive signed area from the vertices.
    const Triangle& t = m.element(e);
    const Point a = m.node(t[0]), b = m.node(t[1]), c = m.node(t[2]);
    CHECK(0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) > 0.0);
    total += g.area;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(element_geometry(m, -1), DomainError);
  CHECK_THROWS_AS(element_geometry(m, m.num_elements()), DomainError);
}

TEST_CASE("boundary flags match coordinates") {
  const Mesh m = build_rect_mesh(5, 3, 2.5, 1.5);
  for (int i = 0; i < m.num_nodes(); ++i) {
    const Point p = m.node(i);
    const bool on = p.x == 0.0 || p.y == 0.0 || p.x == m.lx() || p.y == m.ly();
    CHECK(m.is_boundary(i) == on);
  }
}

TEST_CASE("interior edges are shared by exactly two elements") {
  const Mesh m = build_rect_mesh(3, 4, 1.0, 2.0);
  std::map<std::pair<int, int>, int> count;
  for (const Triangle& t : m.elements()) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  auto same_side = [&](Point p, Point q) {
    return (p.x == 0.0 && q.x == 0.0) || (p.y == 0.0 && q.y == 0.0) ||
           (p.x == m.lx() && q.x == m.lx()) || (p.y == m.ly() && q.y == m.ly());
  };
  int boundary_edges = 0;
  for (const auto& [edge, c] : count) {
    const bool on_side = same_side(m.node(edge.first), m.node(edge.second));
    boundary_edges += on_side ? 1 : 0;
    CHECK(c == (on_side ? 1 : 2));
  }
  CHECK(boundary_edges == 2 * (3 + 4));
}

TEST_CASE("point location at nodes, centroids and diagonals") {
  const Mesh m = build_rect_mesh(4, 4, 1.0, 1.0);
  for (int i = 0; i < m.num_nodes(); ++i) {
    const Location loc = locate_point(m, m.node(i));
    double maxb = 0.0;
    for (double b : loc.bary) maxb = std::max(maxb, b);
    CHECK(maxb == doctest::Approx(1.0));
    const Point back = bary_to_point(m, loc.element, loc.bary);
    CHECK(back.x == doctest::Approx(m.node(i).x));
    CHECK(back.y == doctest::Approx(m.node(i).y));
  }
  // Lower triangle of cell (1,2) has vertices (0.25,0.5),(0.5,0.5),(0.5,0.75).
  const Location c = locate_point(m, {(0.25 + 0.5 + 0.5) / 3.0, (0.5 + 0.5 + 0.75) / 3.0});
  CHECK(c.element == 2 * (2 * 4 + 1));
  for (double b : c.bary) CHECK(b == doctest::Approx(1.0 / 3.0));
  // On the diagonal of cell (1,2): lower triangle.
  const Location d = locate_point(m, {0.25 + 0.1, 0.5 + 0.1});
  CHECK(d.element == 2 * (2 * 4 + 1));
  CHECK_THROWS_AS(locate_point(m, {1.5, 0.5}), DomainError);
  CHECK_THROWS_AS(locate_point(m, {0.5, -0.01}), DomainError);
}

TEST_CASE("random points are reconstructed from their barycentrics") {
  const Mesh m = build_rect_mesh(7, 5, 3.0, 2.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 3.0), uy(0.0, 2.0);
  for (int k = 0; k < 10000; ++k) {
    const Point x{ux(rng), uy(rng)};
    const Location loc = locate_point(m, x);
    double sum = 0.0;
    for (double b : loc.bary) {
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
      sum += b;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    const Point back = bary_to_point(m, loc.element, loc.bary);
    CHECK(std::abs(back.x - x.x) <= 1e-12 * 3.0);
    CHECK(std::abs(back.y - x.y) <= 1e-12 * 3.0);
  }
}

TEST_CASE("mesh construction is deterministic") {
  const Mesh a = build_rect_mesh(6, 3, 1.0, 0.5);
  const Mesh b = build_rect_mesh(6, 3, 1.0, 0.5);
  REQUIRE(a.num_nodes() == b.num_nodes());
  for (int i = 0; i < a.num_nodes(); ++i) {
    CHECK(a.node(i).x == b.node(i).x);
    CHECK(a.node(i).y == b.node(i).y);
  }
  for (int e = 0; e < a.num_elements(); ++e) CHECK(a.element(e) == b.element(e));
}

TEST_CASE("node_location gives an exact vertex") {
  const Mesh m = build_rect_mesh(3, 3, 1.0, 1.0);
  for (int i = 0; i < m.num_nodes(); ++i) {
    const Location loc = node_location(m, i);
    int hits = 0;
    for (int k = 0; k < 3; ++k) {
      if (loc.bary[k] == 1.0) {
        ++hits;
        CHECK(m.element(loc.element)[k] == i);
      }
    }
    CHECK(hits == 1);
  }
}
