#include "vepsim/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <numeric>

#include "vepsim/error.hpp"
#include "vepsim/log.hpp"

namespace vepsim {

namespace {
LogLevel g_log_level = LogLevel::Warning;
}

void set_log_level(LogLevel level) { g_log_level = level; }
LogLevel log_level() { return g_log_level; }
void log_info(const std::string& msg) {
  if (g_log_level >= LogLevel::Info) std::clog << "[info] " << msg << '\n';
}
void log_warning(const std::string& msg) {
  if (g_log_level >= LogLevel::Warning) std::clog << "[warn] " << msg << '\n';
}

int SparseMatrix::find(int i, int j) const {
  const auto first = col_indices.begin() + row_offsets[i];
  const auto last = col_indices.begin() + row_offsets[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - col_indices.begin());
}

double SparseMatrix::at(int i, int j) const {
  const int k = find(i, j);
  return k < 0 ? 0.0 : values[k];
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return nrows == other.nrows && ncols == other.ncols && row_offsets == other.row_offsets &&
         col_indices == other.col_indices;
}

SparseMatrix coo_to_csr(int nrows, int ncols, std::span<const Triplet> triplets) {
  if (nrows < 0 || ncols < 0) throw ParameterError("coo_to_csr: negative dimension");
  std::vector<int> count(static_cast<size_t>(nrows) + 1, 0);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
      throw DomainError("coo_to_csr: entry (" + std::to_string(t.row) + "," +
                        std::to_string(t.col) + ") outside " + std::to_string(nrows) + "x" +
                        std::to_string(ncols));
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  // Bucket by row, then sort each row by column and merge duplicates.
  std::vector<std::pair<int, double>> bucket(triplets.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const Triplet& t : triplets) bucket[fill[t.row]++] = {t.col, t.value};

  SparseMatrix a;
  a.nrows = nrows;
  a.ncols = ncols;
  a.row_offsets.assign(static_cast<size_t>(nrows) + 1, 0);
  a.col_indices.reserve(triplets.size());
  a.values.reserve(triplets.size());
  for (int i = 0; i < nrows; ++i) {
    auto first = bucket.begin() + count[i];
    auto last = bucket.begin() + count[i + 1];
    std::stable_sort(first, last, [](const auto& l, const auto& r) { return l.first < r.first; });
    for (auto it = first; it != last; ++it) {
      if (!a.col_indices.empty() && static_cast<int>(a.col_indices.size()) > a.row_offsets[i] &&
          a.col_indices.back() == it->first) {
        a.values.back() += it->second;
      } else {
        a.col_indices.push_back(it->first);
        a.values.push_back(it->second);
      }
    }
    a.row_offsets[i + 1] = static_cast<int>(a.col_indices.size());
  }
  return a;
}

SparseMatrix identity_matrix(int n) {
  SparseMatrix a;
  a.nrows = a.ncols = n;
  a.row_offsets.resize(static_cast<size_t>(n) + 1);
  std::iota(a.row_offsets.begin(), a.row_offsets.end(), 0);
  a.col_indices.resize(n);
  std::iota(a.col_indices.begin(), a.col_indices.end(), 0);
  a.values.assign(n, 1.0);
  return a;
}

SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix t;
  t.nrows = a.ncols;
  t.ncols = a.nrows;
  t.row_offsets.assign(static_cast<size_t>(t.nrows) + 1, 0);
  for (int c : a.col_indices) ++t.row_offsets[c + 1];
  std::partial_sum(t.row_offsets.begin(), t.row_offsets.end(), t.row_offsets.begin());
  t.col_indices.resize(a.col_indices.size());
  t.values.resize(a.values.size());
  std::vector<int> fill(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (int i = 0; i < a.nrows; ++i) {
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int dst = fill[a.col_indices[k]]++;
      t.col_indices[dst] = i;
      t.values[dst] = a.values[k];
    }
  }
  return t;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.nrows != b.nrows || a.ncols != b.ncols) throw DomainError("add: dimension mismatch");
  const std::array<Block, 2> blocks{Block{0, 0, &a, alpha}, Block{0, 0, &b, beta}};
  const std::array<int, 1> rows{a.nrows};
  const std::array<int, 1> cols{a.ncols};
  return assemble_blocks(rows, cols, blocks);
}

SparseMatrix scale(const SparseMatrix& a, std::span<const double> left,
                   std::span<const double> right) {
  if ((!left.empty() && static_cast<int>(left.size()) != a.nrows) ||
      (!right.empty() && static_cast<int>(right.size()) != a.ncols)) {
    throw DomainError("scale: diagonal length mismatch");
  }
  SparseMatrix s = a;
  for (int i = 0; i < a.nrows; ++i) {
    const double l = left.empty() ? 1.0 : left[i];
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const double r = right.empty() ? 1.0 : right[a.col_indices[k]];
      s.values[k] = l * a.values[k] * r;
    }
  }
  return s;
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != a.ncols || static_cast<int>(y.size()) != a.nrows) {
    throw DomainError("spmv: dimension mismatch (" + std::to_string(a.nrows) + "x" +
                      std::to_string(a.ncols) + " times " + std::to_string(x.size()) + ")");
  }
  for (int i = 0; i < a.nrows; ++i) {
    double s = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      s += a.values[k] * x[a.col_indices[k]];
    }
    y[i] = s;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.nrows);
  spmv_into(a, x, y);
  return y;
}

SparseMatrix assemble_blocks(std::span<const int> row_sizes, std::span<const int> col_sizes,
                             std::span<const Block> blocks) {
  std::vector<int> row_start(row_sizes.size() + 1, 0);
  std::vector<int> col_start(col_sizes.size() + 1, 0);
  std::partial_sum(row_sizes.begin(), row_sizes.end(), row_start.begin() + 1);
  std::partial_sum(col_sizes.begin(), col_sizes.end(), col_start.begin() + 1);
  for (const Block& b : blocks) {
    if (b.block_row < 0 || b.block_row >= static_cast<int>(row_sizes.size()) ||
        b.block_col < 0 || b.block_col >= static_cast<int>(col_sizes.size()) ||
        b.matrix->nrows != row_sizes[b.block_row] || b.matrix->ncols != col_sizes[b.block_col]) {
      throw DomainError("assemble_blocks: block shape mismatch");
    }
  }
  // Blocks of each block row ordered by block column so that concatenating
  // their rows keeps the global column indices sorted.
  std::vector<std::vector<const Block*>> by_row(row_sizes.size());
  for (const Block& b : blocks) by_row[b.block_row].push_back(&b);
  for (auto& list : by_row) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Block* l, const Block* r) { return l->block_col < r->block_col; });
  }

  SparseMatrix out;
  out.nrows = row_start.back();
  out.ncols = col_start.back();
  out.row_offsets.assign(static_cast<size_t>(out.nrows) + 1, 0);
  size_t nnz_bound = 0;
  for (const Block& b : blocks) nnz_bound += b.matrix->values.size();
  out.col_indices.reserve(nnz_bound);
  out.values.reserve(nnz_bound);

  std::vector<std::pair<int, double>> row_buf;
  for (size_t br = 0; br < row_sizes.size(); ++br) {
    const auto& list = by_row[br];
    for (int i = 0; i < row_sizes[br]; ++i) {
      const int gi = row_start[br] + i;
      row_buf.clear();
      for (const Block* b : list) {
        const SparseMatrix& m = *b->matrix;
        const int off = col_start[b->block_col];
        for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k) {
          row_buf.emplace_back(off + m.col_indices[k], b->factor * m.values[k]);
        }
      }
      // Same-position blocks interleave; a stable sort keeps the summation
      // order deterministic.
      std::stable_sort(row_buf.begin(), row_buf.end(),
                       [](const auto& l, const auto& r) { return l.first < r.first; });
      const int row_begin = static_cast<int>(out.col_indices.size());
      for (const auto& [c, v] : row_buf) {
        if (static_cast<int>(out.col_indices.size()) > row_begin && out.col_indices.back() == c) {
          out.values.back() += v;
        } else {
          out.col_indices.push_back(c);
          out.values.push_back(v);
        }
      }
      out.row_offsets[gi + 1] = static_cast<int>(out.col_indices.size());
    }
  }
  return out;
}

void eliminate_rows_cols(SparseMatrix& a, std::span<const int> indices) {
  std::vector<char> mark(static_cast<size_t>(std::max(a.nrows, a.ncols)), 0);
  for (int i : indices) mark[i] = 1;
  for (int i = 0; i < a.nrows; ++i) {
    const bool row_marked = mark[i] != 0;
    bool has_diag = false;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int j = a.col_indices[k];
      if (row_marked) {
        a.values[k] = (j == i) ? 1.0 : 0.0;
        has_diag = has_diag || j == i;
      } else if (j < a.ncols && mark[j]) {
        a.values[k] = 0.0;
      }
    }
    if (row_marked && !has_diag) {
      throw DomainError("eliminate_rows_cols: row " + std::to_string(i) +
                        " has no stored diagonal");
    }
  }
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::None: return "none";
    case SolverMethod::ConjugateGradient: return "cg";
    case SolverMethod::BiCGStab: return "bicgstab";
    case SolverMethod::DirectLU: return "direct-lu";
  }
  return "unknown";
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double relative_residual(const SparseMatrix& a, std::span<const double> b,
                         std::span<const double> x) {
  std::vector<double> r = spmv(a, x);
  for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  const double nr = norm2(r);
  return nb > 0.0 ? nr / nb : nr;
}

namespace {

std::vector<double> jacobi_inverse(const SparseMatrix& a) {
  std::vector<double> inv(a.nrows, 1.0);
  for (int i = 0; i < a.nrows; ++i) {
    const double d = a.at(i, i);
    if (d != 0.0 && std::isfinite(d)) inv[i] = 1.0 / d;
  }
  return inv;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_square(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                  const char* who) {
  if (a.nrows != a.ncols || static_cast<int>(b.size()) != a.nrows ||
      static_cast<int>(x.size()) != a.ncols) {
    throw DomainError(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

SolveReport solve_spd(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                      double tol, int max_iter) {
  check_square(a, b, x, "solve_spd");
  SolveReport rep;
  rep.method = SolverMethod::ConjugateGradient;
  const int n = a.nrows;
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.converged = true;
    return rep;
  }
  const std::vector<double> dinv = jacobi_inverse(a);
  std::vector<double> r = spmv(a, x);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double res = norm2(r) / nb;
  if (res <= tol) {
    rep.converged = true;
    rep.final_relative_residual = res;
    return rep;
  }
  std::vector<double> z(n), p(n), ap(n);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    spmv_into(a, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      rep.iterations = it;
      rep.final_relative_residual = res;
      return rep;
    }
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    res = norm2(r) / nb;
    rep.iterations = it;
    if (res <= tol) break;
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  // The recurrence residual drifts from the true one; report the true value.
  rep.final_relative_residual = relative_residual(a, b, x);
  rep.converged = rep.final_relative_residual <= tol;
  return rep;
}

SolveReport solve_general(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                          double tol, int max_iter) {
  check_square(a, b, x, "solve_general");
  const std::vector<double> dinv = jacobi_inverse(a);
  return solve_preconditioned(a, b, x, tol, max_iter,
                              [&dinv](std::span<const double> r, std::span<double> z) {
                                for (size_t i = 0; i < r.size(); ++i) z[i] = dinv[i] * r[i];
                              });
}

SolveReport solve_preconditioned(const SparseMatrix& a, std::span<const double> b,
                                 std::span<double> x, double tol, int max_iter,
                                 const Preconditioner& prec) {
  check_square(a, b, x, "solve_preconditioned");
  SolveReport rep;
  rep.method = SolverMethod::BiCGStab;
  const int n = a.nrows;
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.converged = true;
    return rep;
  }
  std::vector<double> r = spmv(a, x);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double res = norm2(r) / nb;
  rep.final_relative_residual = res;
  if (res <= tol) {
    rep.converged = true;
    return rep;
  }
  const std::vector<double> r_hat = r;
  std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  constexpr double tiny = 1e-300;
  for (int it = 1; it <= max_iter; ++it) {
    rep.iterations = it;
    const double rho_new = dot(r_hat, r);
    if (std::abs(rho_new) < tiny || !std::isfinite(rho_new)) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    prec(p, p_hat);
    spmv_into(a, p_hat, v);
    const double rv = dot(r_hat, v);
    if (std::abs(rv) < tiny || !std::isfinite(rv)) break;
    alpha = rho / rv;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) / nb <= tol) {
      for (int i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
      break;
    }
    prec(s, s_hat);
    spmv_into(a, s_hat, t);
    const double tt = dot(t, t);
    if (tt < tiny || !std::isfinite(tt)) break;
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p_hat[i] + omega * s_hat[i];
      r[i] = s[i] - omega * t[i];
    }
    res = norm2(r) / nb;
    if (res <= tol) break;
    if (std::abs(omega) < tiny) break;
  }
  rep.final_relative_residual = relative_residual(a, b, x);
  rep.converged = std::isfinite(rep.final_relative_residual) && rep.final_relative_residual <= tol;
  return rep;
}

// ---------------------------------------------------------------------------

using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct DirectSolver::Impl {
  Eigen::SparseLU<EigenCsc, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix pattern;  // values unused
  bool analyzed = false;
  int n = 0;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

namespace {

EigenCsc to_eigen(const SparseMatrix& a) {
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      a.nrows, a.ncols, a.nnz(), a.row_offsets.data(), a.col_indices.data(), a.values.data());
  EigenCsc csc(view);
  csc.makeCompressed();
  return csc;
}

void check_structural_rank(const SparseMatrix& a) {
  for (int i = 0; i < a.nrows; ++i) {
    bool nonzero = false;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      if (a.values[k] != 0.0) {
        nonzero = true;
        break;
      }
    }
    if (!nonzero) {
      throw SolverError("direct solve: matrix row " + std::to_string(i) +
                        " is identically zero (singular)");
    }
  }
}

}  // namespace

void DirectSolver::factorize(const SparseMatrix& a) {
  if (a.nrows != a.ncols) throw DomainError("direct solve: matrix is not square");
  check_structural_rank(a);
  const EigenCsc csc = to_eigen(a);
  if (!impl_->analyzed || !impl_->pattern.same_pattern(a)) {
    impl_->lu.analyzePattern(csc);
    impl_->pattern.nrows = a.nrows;
    impl_->pattern.ncols = a.ncols;
    impl_->pattern.row_offsets = a.row_offsets;
    impl_->pattern.col_indices = a.col_indices;
    impl_->analyzed = true;
  }
  impl_->n = 0;
  impl_->lu.factorize(csc);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analyzed = false;
    throw SolverError("direct solve: factorization failed (" + impl_->lu.lastErrorMessage() + ")");
  }
  impl_->n = a.nrows;
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve_into(b, x);
  return x;
}

void DirectSolver::solve_into(std::span<const double> b, std::span<double> x) const {
  if (static_cast<int>(b.size()) != impl_->n || x.size() != b.size()) {
    throw DomainError("direct solve: rhs size mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(x.size()));
  out = impl_->lu.solve(rhs);
  if (!out.allFinite()) throw SolverError("direct solve: non-finite solution (singular matrix)");
}

int DirectSolver::size() const { return impl_->n; }

void DirectSolver::reset() {
  impl_->n = 0;
}

std::vector<double> solve_direct(const SparseMatrix& a, std::span<const double> b) {
  DirectSolver s;
  s.factorize(a);
  return s.solve(b);
}

SolveReport solve_linear_system(const SparseMatrix& a, std::span<const double> b,
                                std::span<double> x, const LinearSolverSettings& settings,
                                DirectSolver& direct, const std::string& what) {
  SolveReport rep;
  auto run_direct = [&] {
    direct.factorize(a);
    const std::vector<double> sol = direct.solve(b);
    std::copy(sol.begin(), sol.end(), x.begin());
    rep.method = SolverMethod::DirectLU;
    rep.iterations = 1;
    rep.final_relative_residual = relative_residual(a, b, x);
    rep.converged = rep.final_relative_residual <= settings.tol;
  };
  if (a.nrows <= settings.direct_threshold) {
    run_direct();
  } else {
    rep = solve_general(a, b, x, settings.tol, settings.max_iter);
    if (!rep.converged) {
      log_warning(what + ": BiCGStab stopped after " + std::to_string(rep.iterations) +
                  " iterations at relative residual " +
                  std::to_string(rep.final_relative_residual) + ", retrying with direct LU");
      run_direct();
      log_warning(what + ": direct retry reached relative residual " +
                  std::to_string(rep.final_relative_residual));
    }
  }
  if (!rep.converged) {
    throw SolverError(what + ": relative residual " + std::to_string(rep.final_relative_residual) +
                      " exceeds tolerance " + std::to_string(settings.tol) + " (" +
                      to_string(rep.method) + ")");
  }
  return rep;
}

SolveReport solve_with_reuse(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                            const LinearSolverSettings& settings, DirectSolver& direct,
                            bool refactor, const std::string& what) {
  if (!refactor && direct.size() == a.nrows) {
    SolveReport rep = solve_preconditioned(
        a, b, x, settings.tol, settings.reuse_max_iter,
        [&direct](std::span<const double> r, std::span<double> z) { direct.solve_into(r, z); });
    if (rep.converged) return rep;
    log_info(what + ": stale factorization stalled after " + std::to_string(rep.iterations) +
             " iterations, refactorizing");
  }
  direct.factorize(a);
  direct.solve_into(b, x);
  SolveReport rep;
  rep.method = SolverMethod::DirectLU;
  rep.iterations = 1;
  rep.refactored = true;
  rep.final_relative_residual = relative_residual(a, b, x);
  rep.converged = rep.final_relative_residual <= settings.tol;
  if (!rep.converged) {
    throw SolverError(what + ": relative residual " + std::to_string(rep.final_relative_residual) +
                      " exceeds tolerance " + std::to_string(settings.tol) + " after direct LU");
  }
  return rep;
}

}  // namespace vepsim
