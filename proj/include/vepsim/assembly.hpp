#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "vepsim/fields.hpp"
#include "vepsim/mesh.hpp"
#include "vepsim/sparse.hpp"

namespace vepsim {

/// Values at the 3 midpoint quadrature points of every element, indexed
/// 3*e + q where q is the vertex opposite the midpoint.
using QuadValues = std::vector<double>;

/// P1 finite element space on a mesh: the shared node-adjacency sparsity
/// pattern and the scatter map from element matrices into it. Holds a
/// reference to the mesh, which must outlive it.
class P1Space {
 public:
  explicit P1Space(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int num_nodes() const { return mesh_->num_nodes(); }
  /// N x N matrix with the adjacency pattern and zero values.
  SparseMatrix zero_matrix() const { return pattern_; }
  /// Position in the pattern's value array of local entry (a,b) of element e.
  int slot(int e, int a, int b) const { return slots_[e][3 * a + b]; }

 private:
  const Mesh* mesh_;
  SparseMatrix pattern_;
  std::vector<std::array<int, 9>> slots_;
};

/// P1 interpolation of nodal values to the quadrature points.
QuadValues to_quadrature(const Mesh& mesh, std::span<const double> nodal);
/// Quadrature values of g(nodal interpolant).
template <class G>
QuadValues to_quadrature(const Mesh& mesh, std::span<const double> nodal, G&& g) {
  QuadValues q = to_quadrature(mesh, nodal);
  for (double& v : q) v = g(v);
  return q;
}

/// Consistent mass matrix (element block area/6 on, area/12 off the diagonal).
SparseMatrix assemble_mass(const P1Space& space);
/// Integral of w * psi_i * psi_j with w given at the quadrature points.
SparseMatrix assemble_weighted_mass(const P1Space& space, const QuadValues& w);
SparseMatrix assemble_weighted_mass(const P1Space& space, const ScalarField& w_nodal);

/// Integral of grad psi_j . grad psi_i.
SparseMatrix assemble_stiffness(const P1Space& space);
SparseMatrix assemble_stiffness(const P1Space& space, const QuadValues& w);
/// Weighted stiffness with a P1-interpolated nodal weight.
SparseMatrix assemble_stiffness(const P1Space& space, const ScalarField& w_nodal);

/// D_A K D_A: the form (grad I_h[A q], grad I_h[A psi]) on nodal products.
SparseMatrix assemble_A_coupled_stiffness(const P1Space& space, const ScalarField& A_nodal);

/// (K_n D_A, D_A K_n): the cross-diffusion blocks (n grad I_h[A q], grad psi)
/// and (n grad mu, grad I_h[A psi]). Exact transposes of each other.
std::pair<SparseMatrix, SparseMatrix> assemble_cross_coupling(const P1Space& space,
                                                              const ScalarField& n_nodal,
                                                              const ScalarField& A_nodal);
/// Same with n given at the quadrature points.
std::pair<SparseMatrix, SparseMatrix> assemble_cross_coupling(const P1Space& space,
                                                              const QuadValues& n_quad,
                                                              const ScalarField& A_nodal);

/// D[i][j] = integral of psi_i (c . grad psi_j), c given at quadrature points.
SparseMatrix assemble_directional(const P1Space& space, const QuadValues& cx, const QuadValues& cy);

/// (eta D(u), D(v)) on the 2N velocity unknowns ordered (u_x, u_y). With
/// `eliminate_boundary` the boundary rows/columns become identity.
SparseMatrix assemble_viscous(const P1Space& space, const ScalarField& eta_nodal,
                              bool eliminate_boundary = true);
SparseMatrix assemble_viscous(const P1Space& space, const QuadValues& eta,
                              bool eliminate_boundary = true);

/// N x 2N divergence matrix: row i holds (div u, psi_i).
SparseMatrix assemble_div(const P1Space& space);

/// delta0 * sum_K h_K^2 (grad p, grad psi)_K.
SparseMatrix assemble_pressure_stab(const P1Space& space, double delta0);

/// Blocks of the stress / conformation coupling for a lagged tensor C~:
///   first  (2N x 3N): maps C = (C11,C12,C22) to (tr(C) C~, grad v) in the
///                     momentum rows;
///   second (3N x 2N): maps u to the symmetric components of ((grad u) C~, D)
///                     in the tensor rows (C12 row holds the symmetrised
///                     off-diagonal).
std::pair<SparseMatrix, SparseMatrix> assemble_step2_coupling(const P1Space& space,
                                                              const TensorField& C_tilde);

/// Load vector b_i = integral of f psi_i with f given at quadrature points.
std::vector<double> assemble_load(const Mesh& mesh, const QuadValues& f);

/// Pairing x^T A y.
double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y);

}  // namespace vepsim
