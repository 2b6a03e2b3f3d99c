#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vepsim/model.hpp"
#include "vepsim/step_ch.hpp"
#include "vepsim/step_nsp.hpp"

namespace vepsim {

/// Everything a run needs. Built from key=value text on top of an
/// experiment preset.
struct RunConfig {
  int experiment = 1;
  int nx = 128;
  int ny = 128;
  double lx = 128.0;
  double ly = 128.0;
  double dt = 0.1;
  double t_end = 10.0;
  int output_every = 100;      // VTK cadence in steps
  int energy_every = 1;        // energy CSV cadence in steps
  int checkpoint_every = 0;    // 0: only at the end
  bool write_vtk = true;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  ModelParams params;
  InitialConditionSpec initial;
  Step1Settings step1;
  Step2Settings step2;

  int num_steps() const;
};

/// One key=value assignment with its source line (0 for command-line values).
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Syntax pass: strips '#' comments and blank lines, rejects malformed lines
/// and unknown keys. Throws ConfigError carrying the line number.
std::vector<ConfigEntry> parse_config_entries(const std::string& text);

/// Applies the preset named by the last `experiment` entry, then every other
/// entry in order. Range violations throw ConfigError with the entry's line.
RunConfig build_config(const std::vector<ConfigEntry>& entries);

RunConfig parse_config(const std::string& text);

/// Replaces or appends `key`; validates the key name.
void set_entry(std::vector<ConfigEntry>& entries, const std::string& key, const std::string& value);

/// Canonical text (one key=value per line, in entry order with later
/// duplicates winning). Re-parsing it reproduces the same RunConfig.
std::string canonical_text(const std::vector<ConfigEntry>& entries);

/// Names of all accepted keys.
const std::vector<std::string>& config_keys();

}  // namespace vepsim
