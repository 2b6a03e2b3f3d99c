#include "vepsim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "vepsim/error.hpp"
#include "vepsim/log.hpp"
#include "vepsim/semilag.hpp"

namespace vepsim {

Simulation::Simulation(RunConfig config, std::string config_text)
    : config_(std::move(config)), config_text_(std::move(config_text)), rng_(config_.seed) {
  build_solvers();
  const Mesh& mesh = *mesh_;
  const int n = mesh.num_nodes();
  const InitialConditionSpec& ic = config_.initial;
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  fields_.phi = ScalarField(n);
  for (int i = 0; i < n; ++i) fields_.phi[i] = ic.phi_mean + ic.noise_amplitude * noise(rng_);
  fields_.q = ScalarField(n, ic.q0);
  fields_.mu = ScalarField(n);
  fields_.p = ScalarField(n);
  fields_.u = VectorField(n);
  for (int i = 0; i < n; ++i) {
    if (mesh.is_boundary(i)) continue;
    const Point& x = mesh.node(i);
    rotation_velocity(ic, mesh.lx(), mesh.ly(), x.x, x.y, fields_.u.x[i], fields_.u.y[i]);
  }
  fields_.C = TensorField(n, ic.C0);
  initialise_carry();
}

Simulation::Simulation(const Checkpoint& ck)
    : config_(parse_config(ck.config_text)), config_text_(ck.config_text) {
  build_solvers();
  if (ck.fields.phi.size() != mesh_->num_nodes()) {
    throw IoError("checkpoint does not match the configured mesh");
  }
  std::istringstream rs(ck.rng_state);
  rs >> rng_;
  if (!rs) throw IoError("checkpoint: unreadable generator state");
  fields_ = ck.fields;
  carry_ = ck.carry;
  step_ = ck.step;
}

void Simulation::build_solvers() {
  mesh_ = std::make_unique<Mesh>(build_rect_mesh(config_.nx, config_.ny, config_.lx, config_.ly));
  space_ = std::make_unique<P1Space>(*mesh_);
  step1_ = std::make_unique<Step1Solver>(*space_, config_.params, config_.step1);
  step2_ = std::make_unique<Step2Solver>(*space_, config_.params, config_.step2);
}

void Simulation::initialise_carry() {
  const EnergyReport r = energy_components(*mesh_, config_.params, fields_.phi, fields_.q,
                                           fields_.u, fields_.C);
  carry_ = {};
  carry_.mass0 = r.mass;
  carry_.e_tot0 = r.E_tot;
  carry_.e_prev = r.E_tot;
  carry_.e_alg0 = r.E_alg;
}

EnergyReport Simulation::current_report() const {
  EnergyReport r = energy_components(*mesh_, config_.params, fields_.phi, fields_.q, fields_.u,
                                     fields_.C);
  r.step = step_;
  r.t = time();
  r.mass_drift = mass_drift(r.mass, carry_.mass0);
  r.dE = r.E_tot - carry_.e_prev;
  r.cfl = last_cfl_;
  r.fp_iters = last_fp_;
  return r;
}

EnergyReport Simulation::step() {
  const double dt = config_.dt;
  const FootPoints feet = compute_feet(*mesh_, fields_.u, dt);
  Step1Result s1 = step1_->advance(fields_.phi, fields_.q, feet, dt);
  Step2Result s2 = step2_->advance(fields_.u, fields_.C, feet, dt, s1.phi, fields_.phi, s1.mu);

  fields_.phi = std::move(s1.phi);
  fields_.q = std::move(s1.q);
  fields_.mu = std::move(s1.mu);
  if (!config_.step2.freeze_velocity) {
    fields_.u = std::move(s2.u);
    fields_.p = std::move(s2.p);
  }
  fields_.C = std::move(s2.C);
  ++step_;
  last_cfl_ = feet.cfl;
  last_fp_ = s2.fp_iterations;
  if (s2.fp_iterations > 10) {
    log_warning("step " + std::to_string(step_) + ": fixed point needed " +
                std::to_string(s2.fp_iterations) + " iterations");
  }

  carry_.source_acc += dt * elastic_source_rate(*mesh_, config_.params, fields_.phi, fields_.C);
  EnergyReport r = current_report();
  carry_.e_prev = r.E_tot;
  if (r.dE > 0.0) {
    carry_.positive_excursion += r.dE;
    carry_.max_positive_dE = std::max(carry_.max_positive_dE, r.dE);
  }
  return r;
}

Checkpoint Simulation::checkpoint() {
  step1_->request_refactor();
  step2_->request_refactor();
  Checkpoint ck;
  ck.step = step_;
  ck.t = time();
  ck.fields = fields_;
  ck.carry = carry_;
  std::ostringstream rs;
  rs << rng_;
  ck.rng_state = rs.str();
  ck.config_text = config_text_;
  ck.config_hash = fnv1a(config_text_);
  return ck;
}

namespace {

std::string padded(int step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", step);
  return buf;
}

}  // namespace

RunSummary drive(Simulation& sim, const std::filesystem::path& out_dir) {
  const RunConfig& cfg = sim.config();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  const auto energy_path = out_dir / "energy.csv";
  const auto ck_path = out_dir / "checkpoint.bin";
  const auto start = std::chrono::steady_clock::now();

  if (sim.step_index() == 0) {
    std::filesystem::remove(energy_path, ec);
    if (cfg.write_vtk) write_fields_vtk(sim.fields(), sim.mesh(), out_dir / ("fields_" + padded(0) + ".vtk"));
    save_checkpoint(sim.checkpoint(), ck_path);
  } else if (std::filesystem::exists(energy_path, ec)) {
    // Drop rows written after the checkpoint by an interrupted run.
    std::vector<EnergyReport> rows = read_energy_csv(energy_path);
    std::filesystem::remove(energy_path, ec);
    for (const EnergyReport& r : rows) {
      if (r.step <= sim.step_index()) append_energy_csv(r, energy_path);
    }
  }
  RunSummary summary;
  const int total = cfg.num_steps();
  EnergyReport last = sim.current_report();
  while (sim.step_index() < total) {
    last = sim.step();
    ++summary.steps;
    const int s = sim.step_index();
    if (s % cfg.energy_every == 0 || s == total) append_energy_csv(last, energy_path);
    if (cfg.write_vtk && (s % cfg.output_every == 0 || s == total)) {
      write_fields_vtk(sim.fields(), sim.mesh(), out_dir / ("fields_" + padded(s) + ".vtk"));
    }
    if ((cfg.checkpoint_every > 0 && s % cfg.checkpoint_every == 0) || s == total) {
      save_checkpoint(sim.checkpoint(), ck_path);
    }
    log_info("step " + std::to_string(s) + " t=" + std::to_string(last.t) +
             " E_tot=" + std::to_string(last.E_tot) + " fp=" + std::to_string(last.fp_iters));
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.max_positive_dE = sim.carry().max_positive_dE;
  summary.mass_drift = last.mass_drift;
  summary.final_report = last;
  return summary;
}

RunSummary run_simulation(const RunConfig& config, const std::string& config_text) {
  Simulation sim(config, config_text);
  return drive(sim, config.output_dir);
}

RunSummary resume_simulation(const std::filesystem::path& checkpoint_path) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  Simulation sim(ck);
  const auto dir = checkpoint_path.has_parent_path() ? checkpoint_path.parent_path()
                                                     : std::filesystem::path(".");
  return drive(sim, dir);
}

}  // namespace vepsim
