#pragma once

#include <string>
#include <vector>

#include "vepsim/assembly.hpp"
#include "vepsim/fields.hpp"
#include "vepsim/model.hpp"
#include "vepsim/semilag.hpp"
#include "vepsim/sparse.hpp"

namespace vepsim {

enum class StressMode {
  Implicit,  // tr(C) and grad u implicit against the lagged C~ (one coupled solve)
  Lagged,    // coupling terms moved to the right-hand side with the previous iterate
};

std::string to_string(StressMode m);
/// Accepts "implicit" and "lagged".
StressMode parse_stress_mode(const std::string& name);

struct Step2Settings {
  LinearSolverSettings solver;
  double tol_fp = 1e-8;
  int max_fp = 50;
  /// Anderson acceleration depth of the inner fixed point; 0 gives plain
  /// Picard iteration. Changes the iterates, not the converged solution.
  int anderson_depth = 5;
  StressMode stress_mode = StressMode::Implicit;
  /// Keep u = 0, p = 0 and advance only the conformation tensor.
  bool freeze_velocity = false;
};

struct Step2Result {
  VectorField u;
  ScalarField p;
  TensorField C;
  int fp_iterations = 0;
  /// Relative increment of (u, C) after each inner iteration.
  std::vector<double> fp_history;
  SolveReport last_report;
};

/// Navier-Stokes-Peterlin substep. Unknown layout of the coupled system:
/// [u_x, u_y, p, C11, C12, C22], each a block of N nodal values. Velocity
/// Dirichlet nodes and the pressure at node 0 are fixed by identity rows;
/// the pressure is shifted to zero mean after each solve.
///
/// The inner iterate is extrapolated by Anderson mixing over the last
/// `anderson_depth` residuals, restricted to the (u, C) unknowns.
///
/// The coupled system is solved by BiCGStab preconditioned with the
/// block-diagonal part: an LU of the velocity-pressure block (kept for
/// `refactor_interval` steps) and an LU of the tensor block.
class Step2Solver {
 public:
  Step2Solver(const P1Space& space, const ModelParams& params, Step2Settings settings = {});

  /// Throws SolverError when the inner iteration does not converge within
  /// max_fp iterations (the message carries the increment history) or a
  /// linear solve fails.
  Step2Result advance(const VectorField& u, const TensorField& C, const FootPoints& feet, double dt,
                      const ScalarField& phi_new, const ScalarField& phi_old,
                      const ScalarField& mu_half);

  /// Makes the next call factorize the velocity-pressure block afresh.
  void request_refactor() { force_refactor_ = true; }

  const SparseMatrix& last_matrix() const { return matrix_; }
  const std::vector<double>& last_rhs() const { return rhs_; }
  const Step2Settings& settings() const { return settings_; }

 private:
  const P1Space* space_;
  ModelParams params_;
  Coefficients coeff_;
  Step2Settings settings_;
  SparseMatrix mass_;
  SparseMatrix stiff_;
  SparseMatrix div_;
  SparseMatrix div_t_;
  SparseMatrix pstab_;
  std::vector<int> fixed_;  // eliminated rows of the coupled system
  SparseMatrix matrix_;
  std::vector<double> rhs_;
  DirectSolver stokes_direct_;  // velocity-pressure block, reused across steps
  DirectSolver tensor_direct_;  // one tensor component block, refreshed every step
  DirectSolver full_direct_;    // fallback for the coupled system
  bool force_refactor_ = true;
  int since_factor_ = 0;
};

/// Spatially uniform reduction of the tensor update: repeats `n_steps` time
/// steps of (C - C*)/dt + h tr(C~)^2 C = h tr(C~) I, each with the inner
/// fixed point iterated to 1e-14 relative. Tends to I/sqrt(2).
Tensor2 conformation_equilibrium(double h_val, double dt, const Tensor2& start, int n_steps);
/// Isotropic start c0 * I.
Tensor2 conformation_equilibrium(double h_val, double dt, double c0_scalar, int n_steps);

}  // namespace vepsim
