#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include "vepsim/assembly.hpp"
#include "vepsim/checkpoint.hpp"
#include "vepsim/config.hpp"
#include "vepsim/diagnostics.hpp"
#include "vepsim/output.hpp"
#include "vepsim/step_ch.hpp"
#include "vepsim/step_nsp.hpp"

namespace vepsim {

/// Time integrator owning the mesh, the fields and both substep solvers.
/// Each step: feet from u^n, phase-field substep, flow substep, diagnostics.
class Simulation {
 public:
  /// Fresh run: initial data from the config and its seed. `config_text`
  /// is stored in checkpoints so that a resume rebuilds the same config.
  Simulation(RunConfig config, std::string config_text);
  /// Continue from a checkpoint; the config is rebuilt from its text.
  explicit Simulation(const Checkpoint& ck);

  EnergyReport step();

  int step_index() const { return step_; }
  double time() const { return step_ * config_.dt; }
  const RunConfig& config() const { return config_; }
  const std::string& config_text() const { return config_text_; }
  const Mesh& mesh() const { return *mesh_; }
  const FieldSet& fields() const { return fields_; }
  FieldSet& mutable_fields() { return fields_; }
  const DiagnosticCarry& carry() const { return carry_; }
  /// Diagnostics of the current state (dE relative to the previous step).
  EnergyReport current_report() const;

  /// Snapshot for a restart. Also forces fresh factorizations on the next
  /// step, which a restarted run starts with anyway; this keeps the
  /// uninterrupted and the restarted trajectories bitwise identical.
  Checkpoint checkpoint();

 private:
  void build_solvers();
  void initialise_carry();

  RunConfig config_;
  std::string config_text_;
  std::unique_ptr<Mesh> mesh_;
  std::unique_ptr<P1Space> space_;
  std::unique_ptr<Step1Solver> step1_;
  std::unique_ptr<Step2Solver> step2_;
  std::mt19937_64 rng_;
  FieldSet fields_;
  DiagnosticCarry carry_;
  int step_ = 0;
  double last_cfl_ = 0.0;
  int last_fp_ = 0;
};

struct RunSummary {
  int steps = 0;
  double wall_seconds = 0.0;
  double max_positive_dE = 0.0;
  double mass_drift = 0.0;
  EnergyReport final_report;
};

/// Drives a simulation to t_end writing energy.csv, fields_<step>.vtk and
/// checkpoint.bin into the output directory. On a fatal error the last
/// checkpoint on disk is kept and the error is rethrown.
RunSummary run_simulation(const RunConfig& config, const std::string& config_text);
/// Same loop continuing from a checkpoint file, appending to its energy.csv.
RunSummary resume_simulation(const std::filesystem::path& checkpoint_path);

/// Continues `sim` to its t_end with the output policy of run_simulation.
RunSummary drive(Simulation& sim, const std::filesystem::path& out_dir);

}  // namespace vepsim
