#pragma once

#include <span>
#include <vector>

#include "vepsim/assembly.hpp"
#include "vepsim/fields.hpp"
#include "vepsim/model.hpp"
#include "vepsim/semilag.hpp"
#include "vepsim/sparse.hpp"

namespace vepsim {

struct Step1Settings {
  LinearSolverSettings solver;
  /// Evaluate f and f' at the quadrature points instead of nodally.
  bool f_at_quadrature = false;
};

struct Step1Result {
  ScalarField phi;  // phi^{n+1}
  ScalarField q;    // q^{n+1}
  ScalarField mu;   // mu^{n+1/2}
  SolveReport report;
};

/// Phase-field / bulk-stress substep: one coupled linear solve in the
/// unknowns (phi^{n+1}, q^{n+1}, mu^{n+1/2}) ordered in three blocks of N.
///
/// The phi row is tested with every P1 basis function including psi = 1, so
/// the integral of phi^{n+1} equals that of the transported phi exactly up to
/// the linear solver residual.
class Step1Solver {
 public:
  Step1Solver(const P1Space& space, const ModelParams& params, Step1Settings settings = {});

  /// `phi_source`, when non-empty, is a load vector added to the right-hand
  /// side of the phi row. Throws SolverError on solver failure or a
  /// non-finite result.
  Step1Result advance(const ScalarField& phi, const ScalarField& q, const FootPoints& feet,
                      double dt, std::span<const double> phi_source = {});

  /// Makes the next call factorize its matrix afresh instead of reusing the
  /// factorization of an earlier step as a preconditioner.
  void request_refactor() { force_refactor_ = true; }

  /// The system matrix and right-hand side of the last call (for tests).
  const SparseMatrix& last_matrix() const { return matrix_; }
  const std::vector<double>& last_rhs() const { return rhs_; }

 private:
  const P1Space* space_;
  ModelParams params_;
  Coefficients coeff_;
  Step1Settings settings_;
  SparseMatrix mass_;
  SparseMatrix stiff_;
  SparseMatrix matrix_;
  std::vector<double> rhs_;
  DirectSolver direct_;
  bool force_refactor_ = true;
  int since_factor_ = 0;
};

}  // namespace vepsim
