#include "vepsim/step_ch.hpp"

#include <array>
#include <cmath>

#include "vepsim/error.hpp"

namespace vepsim {

Step1Solver::Step1Solver(const P1Space& space, const ModelParams& params, Step1Settings settings)
    : space_(&space),
      params_(params),
      coeff_(params),
      settings_(settings),
      mass_(assemble_mass(space)),
      stiff_(assemble_stiffness(space)) {
  validate(params_);
}

Step1Result Step1Solver::advance(const ScalarField& phi, const ScalarField& q,
                                 const FootPoints& feet, double dt,
                                 std::span<const double> phi_source) {
  if (!(dt > 0.0)) throw ParameterError("step 1: dt must be positive");
  const Mesh& mesh = space_->mesh();
  const int n = mesh.num_nodes();
  if (phi.size() != n || q.size() != n) throw DomainError("step 1: field size mismatch");
  if (!phi_source.empty() && static_cast<int>(phi_source.size()) != n) {
    throw DomainError("step 1: source size mismatch");
  }
  const double kappa = params_.kappa;

  const ScalarField phi_star = transport(mesh, phi, feet);
  const ScalarField q_star = transport(mesh, q, feet);

  ScalarField a_nodal(n);
  for (int i = 0; i < n; ++i) a_nodal[i] = coeff_.A(phi[i]);

  const auto c = [this](Coefficient which) {
    return [this, which](double x) { return coeff_.eval(which, x); };
  };
  const SparseMatrix k_m = assemble_stiffness(*space_, to_quadrature(mesh, phi, c(Coefficient::Mobility)));
  const SparseMatrix k_phi2 =
      assemble_stiffness(*space_, to_quadrature(mesh, phi, [](double x) { return x * x; }));
  const auto [kn_da, da_kn] =
      assemble_cross_coupling(*space_, to_quadrature(mesh, phi, c(Coefficient::CrossMobility)), a_nodal);
  const SparseMatrix da_k_da = scale(stiff_, a_nodal, a_nodal);
  const SparseMatrix m_tau = assemble_weighted_mass(
      *space_, to_quadrature(mesh, phi, [this](double x) { return 1.0 / coeff_.tau(x); }));
  const SparseMatrix q_relax = add(da_k_da, m_tau);

  // Linearised potential: f(phi^n) and the diagonal f'(phi^n)/2 correction.
  SparseMatrix m_fp;
  std::vector<double> f_load;
  if (settings_.f_at_quadrature) {
    m_fp = assemble_weighted_mass(
        *space_, to_quadrature(mesh, phi, [this](double x) { return potential_fprime(params_, x); }));
    f_load = assemble_load(
        mesh, to_quadrature(mesh, phi, [this](double x) { return potential_f(params_, x); }));
  } else {
    std::vector<double> fp(n), f(n);
    for (int i = 0; i < n; ++i) {
      fp[i] = potential_fprime(params_, phi[i]);
      f[i] = potential_f(params_, phi[i]);
    }
    m_fp = scale(mass_, {}, fp);
    f_load = spmv(mass_, f);
  }

  const SparseMatrix mu_phi = add(stiff_, m_fp, -0.5 * params_.c0, -0.5);
  const SparseMatrix phi_mu = add(k_m, k_phi2, 1.0, dt);
  const SparseMatrix q_q = add(mass_, q_relax, 1.0 / dt, 0.5);

  const std::array<int, 3> sizes{n, n, n};
  const std::array<Block, 7> blocks{
      Block{0, 0, &mass_, 1.0 / dt}, Block{0, 1, &kn_da, -0.5 * kappa}, Block{0, 2, &phi_mu},
      Block{1, 1, &q_q},               Block{1, 2, &da_kn, -kappa},       Block{2, 0, &mu_phi},
      Block{2, 2, &mass_}};
  matrix_ = assemble_blocks(sizes, sizes, blocks);

  rhs_.assign(3 * static_cast<size_t>(n), 0.0);
  {
    const std::vector<double> m_phi = spmv(mass_, phi_star);
    const std::vector<double> cross = spmv(kn_da, q);
    const std::vector<double> m_q = spmv(mass_, q_star);
    const std::vector<double> relax = spmv(q_relax, q);
    const std::vector<double> k_phi = spmv(stiff_, phi);
    const std::vector<double> fp_phi = spmv(m_fp, phi);
    for (int i = 0; i < n; ++i) {
      rhs_[i] = m_phi[i] / dt + 0.5 * kappa * cross[i];
      if (!phi_source.empty()) rhs_[i] += phi_source[i];
      rhs_[n + i] = m_q[i] / dt - 0.5 * relax[i];
      rhs_[2 * n + i] = 0.5 * params_.c0 * k_phi[i] + f_load[i] - 0.5 * fp_phi[i];
    }
  }

  // Initial guess: previous phi and q, mu = 0.
  std::vector<double> x(3 * static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = phi[i];
    x[n + i] = q[i];
  }
  Step1Result out;
  if (matrix_.nrows > settings_.solver.direct_threshold) {
    out.report = solve_linear_system(matrix_, rhs_, x, settings_.solver, direct_, "step 1");
  } else {
    const bool refactor =
        force_refactor_ || since_factor_ >= settings_.solver.refactor_interval;
    out.report = solve_with_reuse(matrix_, rhs_, x, settings_.solver, direct_, refactor, "step 1");
    if (out.report.refactored) {
      force_refactor_ = false;
      since_factor_ = 0;
    }
    ++since_factor_;
  }
  out.phi = ScalarField(std::vector<double>(x.begin(), x.begin() + n));
  out.q = ScalarField(std::vector<double>(x.begin() + n, x.begin() + 2 * n));
  out.mu = ScalarField(std::vector<double>(x.begin() + 2 * n, x.end()));
  for (double v : x) {
    if (!std::isfinite(v)) throw SolverError("step 1: non-finite solution");
  }
  return out;
}

}  // namespace vepsim
