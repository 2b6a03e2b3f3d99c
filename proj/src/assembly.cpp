#include "vepsim/assembly.hpp"

#include "vepsim/error.hpp"

namespace vepsim {

namespace {

// lambda_a at midpoint q: zero at the midpoint opposite vertex a, else 1/2.
constexpr double lam(int a, int q) { return a == q ? 0.0 : 0.5; }

void check_nodal(const Mesh& mesh, std::span<const double> v, const char* what) {
  if (static_cast<int>(v.size()) != mesh.num_nodes()) {
    throw DomainError(std::string(what) + ": nodal vector has wrong size");
  }
}

void check_quad(const Mesh& mesh, const QuadValues& v, const char* what) {
  if (v.size() != 3 * static_cast<size_t>(mesh.num_elements())) {
    throw DomainError(std::string(what) + ": quadrature vector has wrong size");
  }
}

double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// Scatter an N x N element kernel kernel(e, a, b) into the shared pattern.
template <class Kernel>
SparseMatrix assemble_scalar(const P1Space& space, Kernel&& kernel) {
  SparseMatrix out = space.zero_matrix();
  const Mesh& mesh = space.mesh();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) out.values[space.slot(e, a, b)] += kernel(e, a, b);
    }
  }
  return out;
}

}  // namespace

P1Space::P1Space(const Mesh& mesh) : mesh_(&mesh) {
  std::vector<Triplet> t;
  t.reserve(9 * static_cast<size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& tri = mesh.element(e);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) t.push_back({tri[a], tri[b], 0.0});
    }
  }
  pattern_ = coo_to_csr(mesh.num_nodes(), mesh.num_nodes(), t);
  slots_.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& tri = mesh.element(e);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) slots_[e][3 * a + b] = pattern_.find(tri[a], tri[b]);
    }
  }
}

QuadValues to_quadrature(const Mesh& mesh, std::span<const double> nodal) {
  check_nodal(mesh, nodal, "to_quadrature");
  QuadValues q(3 * static_cast<size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.element(e);
    q[3 * e + 0] = 0.5 * (nodal[t[1]] + nodal[t[2]]);
    q[3 * e + 1] = 0.5 * (nodal[t[0]] + nodal[t[2]]);
    q[3 * e + 2] = 0.5 * (nodal[t[0]] + nodal[t[1]]);
  }
  return q;
}

SparseMatrix assemble_mass(const P1Space& space) {
  const Mesh& mesh = space.mesh();
  return assemble_scalar(space, [&](int e, int a, int b) {
    const double area = mesh.geometry(e).area;
    return a == b ? area / 6.0 : area / 12.0;
  });
}

SparseMatrix assemble_weighted_mass(const P1Space& space, const QuadValues& w) {
  const Mesh& mesh = space.mesh();
  check_quad(mesh, w, "assemble_weighted_mass");
  return assemble_scalar(space, [&](int e, int a, int b) {
    const double wq = mesh.geometry(e).area / 3.0;
    double s = 0.0;
    for (int q = 0; q < 3; ++q) s += w[3 * e + q] * lam(a, q) * lam(b, q);
    return wq * s;
  });
}

SparseMatrix assemble_weighted_mass(const P1Space& space, const ScalarField& w_nodal) {
  return assemble_weighted_mass(space, to_quadrature(space.mesh(), w_nodal));
}

SparseMatrix assemble_stiffness(const P1Space& space) {
  const Mesh& mesh = space.mesh();
  return assemble_scalar(space, [&](int e, int a, int b) {
    const ElementGeometry& g = mesh.geometry(e);
    return g.area * dot(g.grad_bary[a], g.grad_bary[b]);
  });
}

SparseMatrix assemble_stiffness(const P1Space& space, const QuadValues& w) {
  const Mesh& mesh = space.mesh();
  check_quad(mesh, w, "assemble_stiffness");
  return assemble_scalar(space, [&](int e, int a, int b) {
    const ElementGeometry& g = mesh.geometry(e);
    const double wbar = (w[3 * e] + w[3 * e + 1] + w[3 * e + 2]) / 3.0;
    return g.area * wbar * dot(g.grad_bary[a], g.grad_bary[b]);
  });
}

SparseMatrix assemble_stiffness(const P1Space& space, const ScalarField& w_nodal) {
  return assemble_stiffness(space, to_quadrature(space.mesh(), w_nodal));
}

SparseMatrix assemble_A_coupled_stiffness(const P1Space& space, const ScalarField& A_nodal) {
  check_nodal(space.mesh(), A_nodal, "assemble_A_coupled_stiffness");
  return scale(assemble_stiffness(space), A_nodal, A_nodal);
}

std::pair<SparseMatrix, SparseMatrix> assemble_cross_coupling(const P1Space& space,
                                                              const ScalarField& n_nodal,
                                                              const ScalarField& A_nodal) {
  return assemble_cross_coupling(space, to_quadrature(space.mesh(), n_nodal), A_nodal);
}

std::pair<SparseMatrix, SparseMatrix> assemble_cross_coupling(const P1Space& space,
                                                              const QuadValues& n_quad,
                                                              const ScalarField& A_nodal) {
  check_nodal(space.mesh(), A_nodal, "assemble_cross_coupling");
  const SparseMatrix kn = assemble_stiffness(space, n_quad);
  return {scale(kn, {}, A_nodal), scale(kn, A_nodal, {})};
}

SparseMatrix assemble_directional(const P1Space& space, const QuadValues& cx,
                                  const QuadValues& cy) {
  const Mesh& mesh = space.mesh();
  check_quad(mesh, cx, "assemble_directional");
  check_quad(mesh, cy, "assemble_directional");
  return assemble_scalar(space, [&](int e, int a, int b) {
    const ElementGeometry& g = mesh.geometry(e);
    double s = 0.0;
    for (int q = 0; q < 3; ++q) {
      s += lam(a, q) * (cx[3 * e + q] * g.grad_bary[b].x + cy[3 * e + q] * g.grad_bary[b].y);
    }
    return g.area / 3.0 * s;
  });
}

SparseMatrix assemble_viscous(const P1Space& space, const ScalarField& eta_nodal,
                              bool eliminate_boundary) {
  return assemble_viscous(space, to_quadrature(space.mesh(), eta_nodal), eliminate_boundary);
}

SparseMatrix assemble_viscous(const P1Space& space, const QuadValues& eta,
                              bool eliminate_boundary) {
  const Mesh& mesh = space.mesh();
  check_quad(mesh, eta, "assemble_viscous");
  // D(u):D(v) = ux_x vx_x + uy_y vy_y + (ux_y + uy_x)(vx_y + vy_x)/2.
  auto weight = [&](int e) {
    return mesh.geometry(e).area * (eta[3 * e] + eta[3 * e + 1] + eta[3 * e + 2]) / 3.0;
  };
  const SparseMatrix xx = assemble_scalar(space, [&](int e, int a, int b) {
    const auto& gr = mesh.geometry(e).grad_bary;
    return weight(e) * (gr[a].x * gr[b].x + 0.5 * gr[a].y * gr[b].y);
  });
  const SparseMatrix yy = assemble_scalar(space, [&](int e, int a, int b) {
    const auto& gr = mesh.geometry(e).grad_bary;
    return weight(e) * (gr[a].y * gr[b].y + 0.5 * gr[a].x * gr[b].x);
  });
  // Test component x (row a), trial component y (column b).
  const SparseMatrix xy = assemble_scalar(space, [&](int e, int a, int b) {
    const auto& gr = mesh.geometry(e).grad_bary;
    return weight(e) * 0.5 * gr[a].y * gr[b].x;
  });
  const SparseMatrix yx = transpose(xy);
  const int n = mesh.num_nodes();
  const std::array<int, 2> sizes{n, n};
  const std::array<Block, 4> blocks{Block{0, 0, &xx}, Block{0, 1, &xy}, Block{1, 0, &yx},
                                    Block{1, 1, &yy}};
  SparseMatrix a = assemble_blocks(sizes, sizes, blocks);
  if (eliminate_boundary) {
    std::vector<int> idx;
    for (int b : mesh.boundary_nodes()) {
      idx.push_back(b);
      idx.push_back(n + b);
    }
    eliminate_rows_cols(a, idx);
  }
  return a;
}

SparseMatrix assemble_div(const P1Space& space) {
  const Mesh& mesh = space.mesh();
  const QuadValues one(3 * static_cast<size_t>(mesh.num_elements()), 1.0);
  const QuadValues zero(one.size(), 0.0);
  const SparseMatrix bx = assemble_directional(space, one, zero);
  const SparseMatrix by = assemble_directional(space, zero, one);
  const int n = mesh.num_nodes();
  const std::array<int, 1> rows{n};
  const std::array<int, 2> cols{n, n};
  const std::array<Block, 2> blocks{Block{0, 0, &bx}, Block{0, 1, &by}};
  return assemble_blocks(rows, cols, blocks);
}

SparseMatrix assemble_pressure_stab(const P1Space& space, double delta0) {
  if (!(delta0 >= 0.0)) throw ParameterError("assemble_pressure_stab: delta0 must be >= 0");
  const Mesh& mesh = space.mesh();
  const double h = mesh.element_diameter();
  return assemble_scalar(space, [&](int e, int a, int b) {
    const ElementGeometry& g = mesh.geometry(e);
    return delta0 * h * h * g.area * dot(g.grad_bary[a], g.grad_bary[b]);
  });
}

std::pair<SparseMatrix, SparseMatrix> assemble_step2_coupling(const P1Space& space,
                                                              const TensorField& C_tilde) {
  const Mesh& mesh = space.mesh();
  const QuadValues c11 = to_quadrature(mesh, C_tilde.xx);
  const QuadValues c12 = to_quadrature(mesh, C_tilde.xy);
  const QuadValues c22 = to_quadrature(mesh, C_tilde.yy);
  // gx[i][j] = (psi_i, (C~ grad psi_j)_x), gy likewise for the y row of C~.
  const SparseMatrix gx = assemble_directional(space, c11, c12);
  const SparseMatrix gy = assemble_directional(space, c12, c22);
  const SparseMatrix tx = transpose(gx);
  const SparseMatrix ty = transpose(gy);
  const int n = mesh.num_nodes();

  // Momentum rows: (tr C C~, grad v) couples C11 and C22 equally.
  const std::array<int, 2> vel{n, n};
  const std::array<int, 3> ten{n, n, n};
  const std::array<Block, 4> tb{Block{0, 0, &tx}, Block{0, 2, &tx}, Block{1, 0, &ty},
                                Block{1, 2, &ty}};
  SparseMatrix t = assemble_blocks(vel, ten, tb);

  // Tensor rows: ((grad u) C~)_11, sym part of _12, _22 against psi.
  const std::array<Block, 4> wb{Block{0, 0, &gx}, Block{1, 0, &gy, 0.5}, Block{1, 1, &gx, 0.5},
                                Block{2, 1, &gy}};
  SparseMatrix w = assemble_blocks(ten, vel, wb);
  return {std::move(t), std::move(w)};
}

std::vector<double> assemble_load(const Mesh& mesh, const QuadValues& f) {
  check_quad(mesh, f, "assemble_load");
  std::vector<double> b(static_cast<size_t>(mesh.num_nodes()), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.element(e);
    const double wq = mesh.geometry(e).area / 3.0;
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) s += lam(a, q) * f[3 * e + q];
      b[t[a]] += wq * s;
    }
  }
  return b;
}

double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != a.nrows || static_cast<int>(y.size()) != a.ncols) {
    throw DomainError("bilinear: dimension mismatch");
  }
  double s = 0.0;
  for (int i = 0; i < a.nrows; ++i) {
    double r = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) r += a.values[k] * y[a.col_indices[k]];
    s += x[i] * r;
  }
  return s;
}

}  // namespace vepsim
