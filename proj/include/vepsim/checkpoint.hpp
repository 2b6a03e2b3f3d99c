#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "vepsim/output.hpp"

namespace vepsim {

/// Running sums the diagnostics need across a restart.
struct DiagnosticCarry {
  double mass0 = 0.0;
  double e_tot0 = 0.0;
  double e_prev = 0.0;
  double e_alg0 = 0.0;
  double source_acc = 0.0;          // time integral of the elastic source bound
  double max_positive_dE = 0.0;
  double positive_excursion = 0.0;  // sum of positive energy increments
};

struct Checkpoint {
  int step = 0;
  double t = 0.0;
  FieldSet fields;
  DiagnosticCarry carry;
  std::string rng_state;
  std::string config_text;
  std::uint64_t config_hash = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Binary little-endian dump; written to a temporary file and renamed so an
/// interrupted write never replaces a good checkpoint.
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
/// Throws IoError on a bad magic, version, truncation or hash mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vepsim
