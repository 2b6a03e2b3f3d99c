#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vepsim/checks.hpp"
#include "vepsim/config.hpp"
#include "vepsim/error.hpp"
#include "vepsim/log.hpp"
#include "vepsim/simulation.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vepsim::IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_summary(const vepsim::RunSummary& s) {
  std::printf("steps %d  wall %.2f s  final t %.6g\n", s.steps, s.wall_seconds, s.final_report.t);
  std::printf("E_tot %.10g  max positive dE %.3e  mass drift %.3e  spd fraction %.4f\n",
              s.final_report.E_tot, s.max_positive_dE, s.mass_drift, s.final_report.spd_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscoelastic phase separation simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log every step");
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  auto* run = app.add_subcommand("run", "Run a simulation");
  std::string config_path;
  std::optional<int> experiment, nx, ny;
  std::optional<double> dt, t_end;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  run->add_option("--config", config_path, "key=value configuration file")->required();
  run->add_option("--experiment", experiment, "Experiment preset (1, 2 or 3)");
  run->add_option("--nx", nx, "Cells in x");
  run->add_option("--ny", ny, "Cells in y");
  run->add_option("--dt", dt, "Time step");
  run->add_option("--t-end", t_end, "Final time");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Seed of the initial perturbation");

  auto* check = app.add_subcommand("check", "Run the property checks");

  auto* resume = app.add_subcommand("resume", "Continue from a checkpoint");
  std::string checkpoint_path;
  resume->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);
  vepsim::set_log_level(quiet ? vepsim::LogLevel::Quiet
                              : verbose ? vepsim::LogLevel::Info : vepsim::LogLevel::Warning);

  try {
    if (*run) {
      std::vector<vepsim::ConfigEntry> entries =
          vepsim::parse_config_entries(read_file(config_path));
      if (experiment) vepsim::set_entry(entries, "experiment", std::to_string(*experiment));
      if (nx) vepsim::set_entry(entries, "nx", std::to_string(*nx));
      if (ny) vepsim::set_entry(entries, "ny", std::to_string(*ny));
      if (dt) vepsim::set_entry(entries, "dt", to_text(*dt));
      if (t_end) vepsim::set_entry(entries, "t_end", to_text(*t_end));
      if (out_dir) vepsim::set_entry(entries, "output_dir", *out_dir);
      if (seed) vepsim::set_entry(entries, "seed", std::to_string(*seed));
      const std::string text = vepsim::canonical_text(entries);
      const vepsim::RunConfig cfg = vepsim::parse_config(text);
      std::printf("experiment %d on %dx%d cells, dt %g, %d steps -> %s\n", cfg.experiment, cfg.nx,
                  cfg.ny, cfg.dt, cfg.num_steps(), cfg.output_dir.c_str());
      print_summary(vepsim::run_simulation(cfg, text));
      return 0;
    }
    if (*check) {
      bool ok = true;
      for (const vepsim::CheckReport& r : vepsim::run_property_checks()) {
        std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
    if (*resume) {
      print_summary(vepsim::resume_simulation(checkpoint_path));
      return 0;
    }
  } catch (const vepsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
