#include "vepsim/step_nsp.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/Dense>

#include "vepsim/error.hpp"
#include "vepsim/log.hpp"

namespace vepsim {

std::string to_string(StressMode m) { return m == StressMode::Implicit ? "implicit" : "lagged"; }

StressMode parse_stress_mode(const std::string& name) {
  if (name == "implicit") return StressMode::Implicit;
  if (name == "lagged") return StressMode::Lagged;
  throw ParameterError("unknown stress mode '" + name + "'");
}

Step2Solver::Step2Solver(const P1Space& space, const ModelParams& params, Step2Settings settings)
    : space_(&space),
      params_(params),
      coeff_(params),
      settings_(settings),
      mass_(assemble_mass(space)),
      stiff_(assemble_stiffness(space)),
      div_(assemble_div(space)),
      div_t_(transpose(div_)),
      pstab_(assemble_pressure_stab(space, params.delta0)) {
  validate(params_);
  if (!(settings_.tol_fp > 0.0) || settings_.max_fp < 1 || settings_.anderson_depth < 0) {
    throw ParameterError("step 2: tol_fp must be > 0, max_fp >= 1 and anderson_depth >= 0");
  }
  const Mesh& mesh = space.mesh();
  const int n = mesh.num_nodes();
  for (int b : mesh.boundary_nodes()) fixed_.push_back(b);
  for (int b : mesh.boundary_nodes()) fixed_.push_back(n + b);
  fixed_.push_back(2 * n);
}

Step2Result Step2Solver::advance(const VectorField& u, const TensorField& C, const FootPoints& feet,
                                 double dt, const ScalarField& phi_new, const ScalarField& phi_old,
                                 const ScalarField& mu_half) {
  if (!(dt > 0.0)) throw ParameterError("step 2: dt must be positive");
  const Mesh& mesh = space_->mesh();
  const int n = mesh.num_nodes();
  if (u.size() != n || C.size() != n || phi_new.size() != n || phi_old.size() != n ||
      mu_half.size() != n) {
    throw DomainError("step 2: field size mismatch");
  }
  const bool frozen = settings_.freeze_velocity;
  const bool implicit = settings_.stress_mode == StressMode::Implicit;

  const VectorField u_star = transport(mesh, u, feet);
  const TensorField c_star = transport(mesh, C, feet);

  ScalarField phi_half(n);
  for (int i = 0; i < n; ++i) phi_half[i] = 0.5 * (phi_new[i] + phi_old[i]);
  const QuadValues h_q =
      to_quadrature(mesh, phi_half, [this](double x) { return coeff_.h(x); });

  // Velocity operator and forcing do not depend on the inner iterate.
  SparseMatrix vel;
  std::vector<double> mom_rhs(2 * static_cast<size_t>(n), 0.0);
  if (!frozen) {
    const SparseMatrix visc = assemble_viscous(
        *space_, to_quadrature(mesh, phi_half, [this](double x) { return coeff_.eta(x); }), false);
    const std::array<int, 2> vs{n, n};
    const std::array<Block, 2> vb{Block{0, 0, &mass_, 1.0 / dt}, Block{1, 1, &mass_, 1.0 / dt}};
    vel = add(assemble_blocks(vs, vs, vb), visc);

    const QuadValues phi_q = to_quadrature(mesh, phi_old);
    QuadValues fx(phi_q.size()), fy(phi_q.size());
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Vec2 g = element_gradient(mesh, mu_half, e);
      for (int q = 0; q < 3; ++q) {
        fx[3 * e + q] = phi_q[3 * e + q] * g.x;
        fy[3 * e + q] = phi_q[3 * e + q] * g.y;
      }
    }
    const std::vector<double> lx = assemble_load(mesh, fx);
    const std::vector<double> ly = assemble_load(mesh, fy);
    const std::vector<double> mux = spmv(mass_, u_star.x);
    const std::vector<double> muy = spmv(mass_, u_star.y);
    for (int i = 0; i < n; ++i) {
      mom_rhs[i] = mux[i] / dt - lx[i];
      mom_rhs[n + i] = muy[i] / dt - ly[i];
    }
  }
  std::vector<double> ten_rhs_base(3 * static_cast<size_t>(n));
  {
    const std::vector<double> a = spmv(mass_, c_star.xx);
    const std::vector<double> b = spmv(mass_, c_star.xy);
    const std::vector<double> c = spmv(mass_, c_star.yy);
    for (int i = 0; i < n; ++i) {
      ten_rhs_base[i] = a[i] / dt;
      ten_rhs_base[n + i] = b[i] / dt;
      ten_rhs_base[2 * n + i] = c[i] / dt;
    }
  }

  // Iterate vector in system layout; velocity starts from the transported
  // field with homogeneous boundary values, the tensor from C*.
  const int off_c = frozen ? 0 : 3 * n;
  const int dim = off_c + 3 * n;
  std::vector<double> x(static_cast<size_t>(dim), 0.0);
  if (!frozen) {
    for (int i = 0; i < n; ++i) {
      x[i] = mesh.is_boundary(i) ? 0.0 : u_star.x[i];
      x[n + i] = mesh.is_boundary(i) ? 0.0 : u_star.y[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    x[off_c + i] = c_star.xx[i];
    x[off_c + n + i] = c_star.xy[i];
    x[off_c + 2 * n + i] = c_star.yy[i];
  }

  // Velocity-pressure block; independent of the inner iterate.
  SparseMatrix stokes;
  bool stokes_fresh = false;
  if (!frozen) {
    const std::array<int, 2> sizes{2 * n, n};
    const std::array<Block, 4> blocks{Block{0, 0, &vel}, Block{0, 1, &div_t_, -1.0},
                                      Block{1, 0, &div_}, Block{1, 1, &pstab_}};
    stokes = assemble_blocks(sizes, sizes, blocks);
    eliminate_rows_cols(stokes, fixed_);
    if (force_refactor_ || since_factor_ >= settings_.solver.refactor_interval ||
        stokes_direct_.size() != stokes.nrows) {
      stokes_direct_.factorize(stokes);
      stokes_fresh = true;
      force_refactor_ = false;
      since_factor_ = 0;
    }
    ++since_factor_;
  }
  const Preconditioner block_prec = [&](std::span<const double> r, std::span<double> z) {
    if (!frozen) stokes_direct_.solve_into(r.subspan(0, off_c), z.subspan(0, off_c));
    for (int c = 0; c < 3; ++c) {
      const size_t o = static_cast<size_t>(off_c + c * n);
      tensor_direct_.solve_into(r.subspan(o, n), z.subspan(o, n));
    }
  };

  // Residual mask: the pressure is an output of the map, not an input.
  const auto in_mask = [&](int i) { return frozen || i < 2 * n || i >= 3 * n; };
  std::deque<std::vector<double>> hist_g, hist_f;
  std::vector<double> g_prev, f_prev;

  Step2Result out;
  bool converged = false;
  for (int k = 1; k <= settings_.max_fp && !converged; ++k) {
    TensorField c_tilde(n);
    for (int i = 0; i < n; ++i) {
      c_tilde.xx[i] = x[off_c + i];
      c_tilde.xy[i] = x[off_c + n + i];
      c_tilde.yy[i] = x[off_c + 2 * n + i];
    }
    const QuadValues c11 = to_quadrature(mesh, c_tilde.xx);
    const QuadValues c22 = to_quadrature(mesh, c_tilde.yy);
    QuadValues relax(c11.size()), source(c11.size());
    for (size_t j = 0; j < c11.size(); ++j) {
      const double tr = c11[j] + c22[j];
      relax[j] = h_q[j] * tr * tr;
      source[j] = h_q[j] * tr;
    }
    const SparseMatrix ct =
        add(add(mass_, stiff_, 1.0 / dt, params_.eps), assemble_weighted_mass(*space_, relax));
    if (k == 1) tensor_direct_.factorize(ct);
    const std::vector<double> l_hi = assemble_load(mesh, source);

    rhs_.assign(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < 3 * n; ++i) rhs_[off_c + i] = ten_rhs_base[i];
    for (int i = 0; i < n; ++i) {
      rhs_[off_c + i] += l_hi[i];
      rhs_[off_c + 2 * n + i] += l_hi[i];
    }

    const std::array<int, 3> ts{n, n, n};
    const std::array<Block, 3> tb{Block{0, 0, &ct}, Block{1, 1, &ct}, Block{2, 2, &ct}};
    const SparseMatrix ct3 = assemble_blocks(ts, ts, tb);
    if (frozen) {
      matrix_ = ct3;
    } else {
      const auto [t, w] = assemble_step2_coupling(*space_, c_tilde);
      for (int i = 0; i < 2 * n; ++i) rhs_[i] = mom_rhs[i];
      const std::array<int, 2> sizes{3 * n, 3 * n};
      std::vector<Block> blocks{Block{0, 0, &stokes}, Block{1, 1, &ct3}};
      // Coupling blocks in the [u, p] x [C] block layout.
      const std::array<int, 2> up_rows{2 * n, n};
      const std::array<int, 1> c_cols{3 * n};
      const std::array<Block, 1> tblock{Block{0, 0, &t}};
      const SparseMatrix t_up = assemble_blocks(up_rows, c_cols, tblock);
      const std::array<int, 1> c_rows{3 * n};
      const std::array<int, 2> up_cols{2 * n, n};
      const std::array<Block, 1> wblock{Block{0, 0, &w}};
      const SparseMatrix w_up = assemble_blocks(c_rows, up_cols, wblock);
      if (implicit) {
        blocks.push_back(Block{0, 1, &t_up});
        blocks.push_back(Block{1, 0, &w_up, -2.0});
      } else {
        const std::vector<double> cvec(x.begin() + off_c, x.end());
        const std::vector<double> uvec(x.begin(), x.begin() + 2 * n);
        const std::vector<double> tc = spmv(t, cvec);
        const std::vector<double> wu = spmv(w, uvec);
        for (int i = 0; i < 2 * n; ++i) rhs_[i] -= tc[i];
        for (int i = 0; i < 3 * n; ++i) rhs_[off_c + i] += 2.0 * wu[i];
      }
      matrix_ = assemble_blocks(sizes, sizes, blocks);
      // Identity rows of the fixed unknowns; their columns are cleared too.
      eliminate_rows_cols(matrix_, fixed_);
      for (int idx : fixed_) rhs_[idx] = 0.0;
    }

    std::vector<double> x_new = x;
    SolveReport rep = solve_preconditioned(matrix_, rhs_, x_new, settings_.solver.tol,
                                           settings_.solver.reuse_max_iter, block_prec);
    if (!rep.converged && !frozen && !stokes_fresh) {
      stokes_direct_.factorize(stokes);
      stokes_fresh = true;
      since_factor_ = 1;
      x_new = x;
      rep = solve_preconditioned(matrix_, rhs_, x_new, settings_.solver.tol,
                                 settings_.solver.reuse_max_iter, block_prec);
    }
    if (!rep.converged) {
      log_warning("step 2: block-preconditioned solve stalled at relative residual " +
                  std::to_string(rep.final_relative_residual) + ", using a direct solve");
      x_new = x;
      rep = solve_linear_system(matrix_, rhs_, x_new, settings_.solver, full_direct_, "step 2");
    }
    out.last_report = rep;
    for (double v : x_new) {
      if (!std::isfinite(v)) throw SolverError("step 2: non-finite solution");
    }

    // Increment over the (u, C) unknowns only.
    double diff2 = 0.0, norm2_new = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (!frozen && i >= 2 * n && i < 3 * n) continue;
      const double d = x_new[i] - x[i];
      diff2 += d * d;
      norm2_new += x_new[i] * x_new[i];
    }
    const double rel = norm2_new > 0.0 ? std::sqrt(diff2 / norm2_new) : std::sqrt(diff2);
    out.fp_history.push_back(rel);
    out.fp_iterations = k;
    converged = rel < settings_.tol_fp;
    if (converged || settings_.anderson_depth == 0) {
      x = std::move(x_new);
      continue;
    }

    std::vector<double> f(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < dim; ++i) {
      if (in_mask(i)) f[i] = x_new[i] - x[i];
    }
    if (!g_prev.empty()) {
      std::vector<double> dg(static_cast<size_t>(dim)), df(static_cast<size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        dg[i] = x_new[i] - g_prev[i];
        df[i] = f[i] - f_prev[i];
      }
      hist_g.push_back(std::move(dg));
      hist_f.push_back(std::move(df));
      if (static_cast<int>(hist_f.size()) > settings_.anderson_depth) {
        hist_g.pop_front();
        hist_f.pop_front();
      }
    }
    g_prev = x_new;
    f_prev = f;
    if (hist_f.empty()) {
      x = std::move(x_new);
      continue;
    }
    const int m = static_cast<int>(hist_f.size());
    Eigen::MatrixXd df_mat(dim, m);
    for (int j = 0; j < m; ++j) {
      df_mat.col(j) = Eigen::Map<const Eigen::VectorXd>(hist_f[j].data(), dim);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(df_mat);
    qr.setThreshold(1e-10);
    const Eigen::VectorXd gamma = qr.solve(Eigen::Map<const Eigen::VectorXd>(f.data(), dim));
    x = std::move(x_new);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < dim; ++i) x[i] -= gamma[j] * hist_g[j][i];
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "step 2: fixed point did not converge in " << settings_.max_fp
        << " iterations; increments:";
    for (double r : out.fp_history) msg << ' ' << r;
    throw SolverError(msg.str());
  }

  out.u = VectorField(n);
  out.p = ScalarField(n);
  out.C = TensorField(n);
  for (int i = 0; i < n; ++i) {
    if (!frozen) {
      out.u.x[i] = x[i];
      out.u.y[i] = x[n + i];
      out.p[i] = x[2 * n + i];
    }
    out.C.xx[i] = x[off_c + i];
    out.C.xy[i] = x[off_c + n + i];
    out.C.yy[i] = x[off_c + 2 * n + i];
  }
  if (!frozen) {
    const double shift = integrate(mesh, out.p) / mesh.domain_area();
    for (double& v : out.p.values) v -= shift;
  }
  return out;
}

Tensor2 conformation_equilibrium(double h_val, double dt, const Tensor2& start, int n_steps) {
  if (!(dt > 0.0) || n_steps < 0) throw ParameterError("conformation_equilibrium: bad arguments");
  Tensor2 c = start;
  for (int s = 0; s < n_steps; ++s) {
    const Tensor2 star = c;
    Tensor2 it = star;
    for (int k = 0; k < 200; ++k) {
      const double tr = it.trace();
      const double denom = 1.0 + dt * h_val * tr * tr;
      const Tensor2 next{(star.xx + dt * h_val * tr) / denom, star.xy / denom,
                         (star.yy + dt * h_val * tr) / denom};
      const double d = std::abs(next.xx - it.xx) + std::abs(next.xy - it.xy) +
                       std::abs(next.yy - it.yy);
      const double s_norm = std::abs(next.xx) + std::abs(next.xy) + std::abs(next.yy);
      it = next;
      if (d <= 1e-14 * s_norm) break;
    }
    c = it;
  }
  return c;
}

Tensor2 conformation_equilibrium(double h_val, double dt, double c0_scalar, int n_steps) {
  return conformation_equilibrium(h_val, dt, Tensor2{c0_scalar, 0.0, c0_scalar}, n_steps);
}

}  // namespace vepsim
