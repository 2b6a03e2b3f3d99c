#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vepsim {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing within
/// each row; row_offsets has nrows+1 entries.
struct SparseMatrix {
  int nrows = 0;
  int ncols = 0;
  std::vector<int> row_offsets{0};
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }
  /// Value at (i,j), zero when not stored. Binary search within the row.
  double at(int i, int j) const;
  /// Index into `values` of entry (i,j) or -1.
  int find(int i, int j) const;
  bool same_pattern(const SparseMatrix& other) const;
};

/// Duplicates are summed; throws DomainError on out-of-range indices.
SparseMatrix coo_to_csr(int nrows, int ncols, std::span<const Triplet> triplets);

SparseMatrix identity_matrix(int n);
SparseMatrix transpose(const SparseMatrix& a);
/// alpha*A + beta*B; the patterns may differ.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);
/// diag(left) * A * diag(right); empty spans mean identity.
SparseMatrix scale(const SparseMatrix& a, std::span<const double> left,
                   std::span<const double> right);
double max_abs(const SparseMatrix& a);

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
/// y = A x without allocation.
void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// One block of a block matrix: `matrix` placed at block (block_row,
/// block_col) and multiplied by `factor`.
struct Block {
  int block_row = 0;
  int block_col = 0;
  const SparseMatrix* matrix = nullptr;
  double factor = 1.0;
};

/// Assemble a block matrix. `row_sizes` / `col_sizes` give the dimensions of
/// the block rows and columns; overlapping blocks are summed.
SparseMatrix assemble_blocks(std::span<const int> row_sizes, std::span<const int> col_sizes,
                             std::span<const Block> blocks);

/// Replace the listed rows by identity rows and zero the listed columns
/// elsewhere (homogeneous Dirichlet elimination). The pattern is kept.
void eliminate_rows_cols(SparseMatrix& a, std::span<const int> indices);

enum class SolverMethod { None, ConjugateGradient, BiCGStab, DirectLU };
std::string to_string(SolverMethod m);

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
  SolverMethod method = SolverMethod::None;
  bool refactored = false;  // a new LU factorization was computed
};

/// z = M^{-1} r for a preconditioner M.
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

/// Jacobi-preconditioned conjugate gradients. `x` holds the initial guess on
/// entry. Non-convergence is reported, not thrown.
SolveReport solve_spd(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                      double tol, int max_iter);

/// Jacobi-preconditioned BiCGStab. Breakdown or non-convergence is reported.
SolveReport solve_general(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                          double tol, int max_iter);

/// Right-preconditioned BiCGStab; `x` holds the initial guess.
SolveReport solve_preconditioned(const SparseMatrix& a, std::span<const double> b,
                                 std::span<double> x, double tol, int max_iter,
                                 const Preconditioner& prec);

/// Sparse LU with partial pivoting. Throws SolverError when the matrix is
/// structurally or numerically singular.
std::vector<double> solve_direct(const SparseMatrix& a, std::span<const double> b);

/// Reusable sparse LU: the fill-reducing ordering is recomputed only when the
/// sparsity pattern changes. Single owner.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  void factorize(const SparseMatrix& a);
  std::vector<double> solve(std::span<const double> b) const;
  void solve_into(std::span<const double> b, std::span<double> x) const;
  /// Dimension of the current factorization, 0 when there is none.
  int size() const;
  /// Forget the factorization (the ordering is kept).
  void reset();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct LinearSolverSettings {
  double tol = 1e-10;
  int max_iter = 5000;
  /// Systems with at most this many unknowns are factorized directly.
  int direct_threshold = 30000;
  /// BiCGStab iterations allowed with a stale LU preconditioner before the
  /// matrix is refactorized.
  int reuse_max_iter = 30;
  /// Time steps between forced refactorizations of reused LU factors.
  int refactor_interval = 10;
};

/// Default solution path for the assembled step systems: direct below the
/// threshold, otherwise BiCGStab with one direct retry on failure. The
/// relative residual of the returned solution is recomputed and checked
/// against `settings.tol`; a violation throws SolverError naming `what`.
SolveReport solve_linear_system(const SparseMatrix& a, std::span<const double> b,
                                std::span<double> x, const LinearSolverSettings& settings,
                                DirectSolver& direct, const std::string& what);

/// Solve with an LU factorization that may belong to an earlier, nearby
/// matrix. Unless `refactor` is set and when `direct` holds a factorization of
/// the right size, BiCGStab preconditioned by it is tried first; otherwise, or
/// when that stalls, `a` is factorized and solved directly. The outcome is a
/// deterministic function of the sequence of calls. Throws SolverError when
/// the direct residual exceeds the tolerance.
SolveReport solve_with_reuse(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                            const LinearSolverSettings& settings, DirectSolver& direct,
                            bool refactor, const std::string& what);

double norm2(std::span<const double> v);
double relative_residual(const SparseMatrix& a, std::span<const double> b,
                         std::span<const double> x);

}  // namespace vepsim
