#include "vepsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "vepsim/error.hpp"

namespace vepsim {

int RunConfig::num_steps() const { return static_cast<int>(std::llround(t_end / dt)); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const ConfigEntry& en) {
  double v = 0.0;
  const char* first = en.value.data();
  const char* last = first + en.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(en.line, en.key + ": expected a number, got '" + en.value + "'");
  }
  return v;
}

long long to_int(const ConfigEntry& en) {
  long long v = 0;
  const char* first = en.value.data();
  const char* last = first + en.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(en.line, en.key + ": expected an integer, got '" + en.value + "'");
  }
  return v;
}

bool to_bool(const ConfigEntry& en) {
  if (en.value == "true" || en.value == "1" || en.value == "yes") return true;
  if (en.value == "false" || en.value == "0" || en.value == "no") return false;
  throw ConfigError(en.line, en.key + ": expected true or false, got '" + en.value + "'");
}

void require(bool ok, const ConfigEntry& en, const std::string& what) {
  if (!ok) throw ConfigError(en.line, en.key + " out of range: " + what + " (got " + en.value + ")");
}

using Setter = std::function<void(RunConfig&, const ConfigEntry&)>;

Setter positive_double(double RunConfig::*field) {
  return [field](RunConfig& c, const ConfigEntry& e) {
    const double v = to_double(e);
    require(v > 0.0, e, "must be > 0");
    c.*field = v;
  };
}

Setter int_at_least(int RunConfig::*field, long long lo) {
  return [field, lo](RunConfig& c, const ConfigEntry& e) {
    const long long v = to_int(e);
    require(v >= lo && v <= 1000000000LL, e, "must be >= " + std::to_string(lo));
    c.*field = static_cast<int>(v);
  };
}

template <class F>
Setter param_double(F&& assign, std::function<bool(double)> ok, std::string rule) {
  return [assign, ok, rule](RunConfig& c, const ConfigEntry& e) {
    const double v = to_double(e);
    require(ok(v), e, rule);
    assign(c, v);
  };
}

bool any(double) { return true; }
bool positive(double v) { return v > 0.0; }
bool nonneg(double v) { return v >= 0.0; }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["experiment"] = [](RunConfig&, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 1 && v <= 3, e, "must be 1, 2 or 3");
    };
    t["nx"] = int_at_least(&RunConfig::nx, 1);
    t["ny"] = int_at_least(&RunConfig::ny, 1);
    t["lx"] = positive_double(&RunConfig::lx);
    t["ly"] = positive_double(&RunConfig::ly);
    t["dt"] = positive_double(&RunConfig::dt);
    t["t_end"] = positive_double(&RunConfig::t_end);
    t["output_every"] = int_at_least(&RunConfig::output_every, 1);
    t["energy_every"] = int_at_least(&RunConfig::energy_every, 1);
    t["checkpoint_every"] = int_at_least(&RunConfig::checkpoint_every, 0);
    t["write_vtk"] = [](RunConfig& c, const ConfigEntry& e) { c.write_vtk = to_bool(e); };
    t["output_dir"] = [](RunConfig& c, const ConfigEntry& e) {
      require(!e.value.empty(), e, "must not be empty");
      c.output_dir = e.value;
    };
    t["seed"] = [](RunConfig& c, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 0, e, "must be >= 0");
      c.seed = static_cast<std::uint64_t>(v);
    };
    // Linear and nonlinear solvers.
    t["solver_tol"] = param_double(
        [](RunConfig& c, double v) { c.step1.solver.tol = c.step2.solver.tol = v; },
        [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)");
    t["solver_max_iter"] = [](RunConfig& c, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 1 && v <= 100000000LL, e, "must be >= 1");
      c.step1.solver.max_iter = c.step2.solver.max_iter = static_cast<int>(v);
    };
    t["direct_threshold"] = [](RunConfig& c, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 0 && v <= 1000000000LL, e, "must be >= 0");
      c.step1.solver.direct_threshold = c.step2.solver.direct_threshold = static_cast<int>(v);
    };
    t["tol_fp"] = param_double([](RunConfig& c, double v) { c.step2.tol_fp = v; },
                               [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)");
    t["max_fp"] = [](RunConfig& c, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 1 && v <= 100000, e, "must be >= 1");
      c.step2.max_fp = static_cast<int>(v);
    };
    t["anderson_depth"] = [](RunConfig& c, const ConfigEntry& e) {
      const long long v = to_int(e);
      require(v >= 0 && v <= 50, e, "must lie in [0,50]");
      c.step2.anderson_depth = static_cast<int>(v);
    };
    t["stress_mode"] = [](RunConfig& c, const ConfigEntry& e) {
      try {
        c.step2.stress_mode = parse_stress_mode(e.value);
      } catch (const ParameterError& err) {
        throw ConfigError(e.line, e.key + ": " + err.what());
      }
    };
    t["f_eval"] = [](RunConfig& c, const ConfigEntry& e) {
      require(e.value == "nodal" || e.value == "quadrature", e, "must be nodal or quadrature");
      c.step1.f_at_quadrature = e.value == "quadrature";
    };
    t["freeze_velocity"] = [](RunConfig& c, const ConfigEntry& e) {
      c.step2.freeze_velocity = to_bool(e);
    };
    // Model parameters.
    t["kappa"] = param_double([](RunConfig& c, double v) { c.params.kappa = v; },
                              [](double v) { return v >= 0.0 && v <= 1.0; }, "must lie in [0,1]");
    t["delta0"] = param_double([](RunConfig& c, double v) { c.params.delta0 = v; }, nonneg,
                               "must be >= 0");
    t["c0"] = param_double([](RunConfig& c, double v) { c.params.c0 = v; }, positive, "must be > 0");
    t["eps"] = param_double([](RunConfig& c, double v) { c.params.eps = v; }, positive,
                            "must be > 0");
    t["phi_star"] = param_double([](RunConfig& c, double v) { c.params.phi_star = v; },
                                 [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)");
    t["eta_min"] = param_double([](RunConfig& c, double v) { c.params.eta_min = v; }, positive,
                                "must be > 0");
    t["potential"] = [](RunConfig& c, const ConfigEntry& e) {
      try {
        c.params.potential.kind = parse_potential_kind(e.value);
      } catch (const ParameterError& err) {
        throw ConfigError(e.line, e.key + ": " + err.what());
      }
    };
    t["gl_a"] = param_double([](RunConfig& c, double v) { c.params.potential.gl_a = v; }, nonneg,
                             "must be >= 0");
    t["well_a"] = param_double([](RunConfig& c, double v) { c.params.potential.well_a = v; }, any, "");
    t["well_b"] = param_double([](RunConfig& c, double v) { c.params.potential.well_b = v; }, any, "");
    t["n_p"] = param_double([](RunConfig& c, double v) { c.params.potential.n_p = v; }, positive,
                            "must be > 0");
    t["n_s"] = param_double([](RunConfig& c, double v) { c.params.potential.n_s = v; }, positive,
                            "must be > 0");
    t["chi"] = param_double([](RunConfig& c, double v) { c.params.potential.chi = v; }, any, "");
    t["fh_delta"] = param_double([](RunConfig& c, double v) { c.params.fh_delta = v; },
                                 [](double v) { return v > 0.0 && v < 0.5; }, "must lie in (0,0.5)");
    // Coefficient overrides.
    t["override_m"] = param_double([](RunConfig& c, double v) { c.params.overrides.m = v; }, nonneg, "must be >= 0");
    t["override_n"] = param_double([](RunConfig& c, double v) { c.params.overrides.n = v; }, nonneg, "must be >= 0");
    t["override_A"] = param_double([](RunConfig& c, double v) { c.params.overrides.A = v; }, positive, "must be > 0");
    t["override_tau"] = param_double([](RunConfig& c, double v) { c.params.overrides.tau = v; }, positive, "must be > 0");
    t["override_h"] = param_double([](RunConfig& c, double v) { c.params.overrides.h = v; }, nonneg, "must be >= 0");
    t["override_eta"] = param_double([](RunConfig& c, double v) { c.params.overrides.eta = v; }, positive, "must be > 0");
    // Initial data.
    t["phi_mean"] = param_double([](RunConfig& c, double v) { c.initial.phi_mean = v; },
                                 [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)");
    t["noise_amplitude"] = param_double([](RunConfig& c, double v) { c.initial.noise_amplitude = v; },
                                        nonneg, "must be >= 0");
    t["q0"] = param_double([](RunConfig& c, double v) { c.initial.q0 = v; }, any, "");
    t["C0_11"] = param_double([](RunConfig& c, double v) { c.initial.C0.xx = v; }, any, "");
    t["C0_12"] = param_double([](RunConfig& c, double v) { c.initial.C0.xy = v; }, any, "");
    t["C0_22"] = param_double([](RunConfig& c, double v) { c.initial.C0.yy = v; }, any, "");
    t["rotation"] = [](RunConfig& c, const ConfigEntry& e) { c.initial.rotation = to_bool(e); };
    t["ball_radius_fraction"] = param_double(
        [](RunConfig& c, double v) { c.initial.ball_radius_fraction = v; },
        [](double v) { return v > 0.0 && v <= 0.5; }, "must lie in (0,0.5]");
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::vector<ConfigEntry> parse_config_entries(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key=value, got '" + s + "'");
    ConfigEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(line, "missing key before '='");
    if (e.value.empty()) throw ConfigError(line, e.key + ": missing value");
    if (!setters().count(e.key)) throw ConfigError(line, "unknown key '" + e.key + "'");
    out.push_back(std::move(e));
  }
  return out;
}

RunConfig build_config(const std::vector<ConfigEntry>& entries) {
  RunConfig c;
  for (const ConfigEntry& e : entries) {
    if (e.key == "experiment") {
      setters().at("experiment")(c, e);
      c.experiment = static_cast<int>(to_int(e));
    }
  }
  const ExperimentPreset preset = experiment_preset(c.experiment);
  c.params = preset.params;
  c.initial = preset.initial;
  for (const ConfigEntry& e : entries) {
    const auto it = setters().find(e.key);
    if (it == setters().end()) throw ConfigError(e.line, "unknown key '" + e.key + "'");
    it->second(c, e);
  }
  try {
    validate(c.params);
  } catch (const ParameterError& err) {
    throw ConfigError(0, err.what());
  }
  if (c.num_steps() < 1) throw ConfigError(0, "t_end / dt must give at least one step");
  return c;
}

RunConfig parse_config(const std::string& text) { return build_config(parse_config_entries(text)); }

void set_entry(std::vector<ConfigEntry>& entries, const std::string& key, const std::string& value) {
  if (!setters().count(key)) throw ConfigError(0, "unknown key '" + key + "'");
  entries.erase(std::remove_if(entries.begin(), entries.end(),
                               [&](const ConfigEntry& e) { return e.key == key; }),
                entries.end());
  entries.push_back({key, value, 0});
}

std::string canonical_text(const std::vector<ConfigEntry>& entries) {
  std::vector<const ConfigEntry*> last;
  for (const ConfigEntry& e : entries) {
    auto it = std::find_if(last.begin(), last.end(), [&](const ConfigEntry* p) { return p->key == e.key; });
    if (it != last.end()) last.erase(it);
    last.push_back(&e);
  }
  std::string out;
  for (const ConfigEntry* e : last) out += e->key + "=" + e->value + "\n";
  return out;
}

}  // namespace vepsim
