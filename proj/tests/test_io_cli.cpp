#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vepsim/checkpoint.hpp"
#include "vepsim/config.hpp"
#include "vepsim/error.hpp"
#include "vepsim/output.hpp"
#include "vepsim/simulation.hpp"

using namespace vepsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vepsim_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

FieldSet sample_fields(const Mesh& m) {
  const int n = m.num_nodes();
  FieldSet f{ScalarField(n), ScalarField(n), ScalarField(n), ScalarField(n), VectorField(n), TensorField(n)};
  for (int i = 0; i < n; ++i) {
    const Point x = m.node(i);
    f.phi[i] = 0.4 + 0.1 * std::sin(x.x) * std::cos(3.0 * x.y) + 1e-13 * i;
    f.q[i] = -x.x * x.y;
    f.mu[i] = std::exp(-x.x);
    f.p[i] = 1.0 / 3.0 + i;
    f.u.x[i] = x.y;
    f.u.y[i] = -x.x;
    f.C.set(i, {1.0 + x.x, 0.1 * x.y, 2.0});
  }
  return f;
}

std::string small_run_config(int steps, const std::string& extra = "") {
  return "experiment=1\nnx=8\nny=8\nlx=8\nly=8\ndt=0.1\nt_end=" + std::to_string(0.1 * steps) +
         "\nwrite_vtk=false\n" + extra;
}

}  // namespace

TEST_CASE("config: preset with overrides") {
  const RunConfig c = parse_config("experiment=1\ndt=0.1\nnx=64");
  CHECK(c.experiment == 1);
  CHECK(c.nx == 64);
  CHECK(c.ny == 128);
  CHECK(c.dt == 0.1);
  CHECK(c.initial.C0.xx == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.params.potential.kind == PotentialKind::ModifiedGinzburgLandau);
}

TEST_CASE("config: comments, blanks and experiment 2 defaults") {
  const RunConfig c = parse_config("# comment\n\n  experiment = 2  # trailing\n");
  CHECK(c.experiment == 2);
  CHECK(c.params.potential.kind == PotentialKind::FloryHuggins);
  CHECK(c.initial.C0.xx == 1.0);

  std::vector<ConfigEntry> entries = parse_config_entries("");
  set_entry(entries, "experiment", "2");
  const RunConfig d = build_config(entries);
  CHECK(d.params.potential.kind == PotentialKind::FloryHuggins);
}

TEST_CASE("config: errors carry line numbers and key names") {
  CHECK(config_error_line("dt=-1") == 1);
  try {
    parse_config("dt=-1");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
  CHECK(config_error_line("nx=8\n\ntimestep=0.1") == 3);
  CHECK(config_error_line("nx=8\nny 8") == 2);
  CHECK(config_error_line("nx=eight") == 1);
  CHECK(config_error_line("output_every=0") == 1);
  CHECK(config_error_line("kappa=2") == 1);
  CHECK(config_error_line("t_end=0") == 1);
  CHECK(config_error_line("nx=8\nanderson_depth=-1") == 2);
  CHECK(parse_config("anderson_depth=0").step2.anderson_depth == 0);
  CHECK(parse_config("").step2.anderson_depth == 5);
  std::vector<ConfigEntry> entries;
  CHECK_THROWS_AS(set_entry(entries, "no_such_key", "1"), ConfigError);
}

TEST_CASE("config: later values win and canonical text round trips") {
  std::vector<ConfigEntry> entries = parse_config_entries("nx=8\nny=4\nnx=16\nkappa=0.5\n");
  set_entry(entries, "dt", "0.05");
  const RunConfig a = build_config(entries);
  CHECK(a.nx == 16);
  CHECK(a.dt == 0.05);
  const std::string canon = canonical_text(entries);
  const RunConfig b = parse_config(canon);
  CHECK(b.nx == a.nx);
  CHECK(b.ny == a.ny);
  CHECK(b.dt == a.dt);
  CHECK(b.params.kappa == a.params.kappa);
  CHECK(canonical_text(parse_config_entries(canon)) == canon);
  CHECK(a.num_steps() == 200);
}

TEST_CASE("VTK output of the smallest mesh") {
  const Mesh m = build_rect_mesh(1, 1, 1.0, 1.0);
  const fs::path dir = scratch("vtk1");
  write_fields_vtk(sample_fields(m), m, dir / "a.vtk");
  const std::string text = slurp(dir / "a.vtk");
  CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("POINTS 4") != std::string::npos);
  CHECK(text.find("CELLS 2 8") != std::string::npos);
  CHECK(text.find("CELL_TYPES 2") != std::string::npos);
  const VtkContents v = read_vtk(dir / "a.vtk");
  CHECK(v.num_points == 4);
  CHECK(v.num_cells == 2);
  CHECK(v.scalars.size() == 4);
  CHECK(v.vectors.size() == 1);
  CHECK(v.tensors.size() == 1);
}

TEST_CASE("VTK round trip") {
  const Mesh m = build_rect_mesh(5, 3, 2.0, 1.0);
  const FieldSet f = sample_fields(m);
  const fs::path dir = scratch("vtk2");
  write_fields_vtk(f, m, dir / "b.vtk");
  const VtkContents v = read_vtk(dir / "b.vtk");
  const auto& phi = v.scalar("phi");
  REQUIRE(phi.size() == static_cast<size_t>(m.num_nodes()));
  for (int i = 0; i < m.num_nodes(); ++i) {
    CHECK(std::abs(phi[i] - f.phi[i]) <= 1e-12);
    CHECK(std::abs(v.scalar("p")[i] - f.p[i]) <= 1e-12 * (1.0 + std::abs(f.p[i])));
    CHECK(v.points[3 * i] == doctest::Approx(m.node(i).x));
    CHECK(v.points[3 * i + 2] == 0.0);
    const auto& c = v.tensors[0].second;
    CHECK(c[9 * i + 1] == doctest::Approx(f.C.xy[i]));
    CHECK(c[9 * i + 3] == doctest::Approx(f.C.xy[i]));
    CHECK(c[9 * i + 8] == 0.0);
    CHECK(v.vectors[0].second[3 * i + 2] == 0.0);
  }
  CHECK_THROWS_AS(write_fields_vtk(f, m, dir / "missing" / "x.vtk"), IoError);
}

TEST_CASE("energy CSV") {
  const fs::path dir = scratch("csv");
  const fs::path path = dir / "energy.csv";
  EnergyReport r;
  r.step = 1;
  r.t = 0.1;
  r.E_tot = 1.0 / 3.0;
  r.dE = -1e-7;
  r.fp_iters = 4;
  append_energy_csv(r, path);
  r.step = 2;
  r.E_tot = 0.3;
  append_energy_csv(r, path);
  const std::string text = slurp(path);
  CHECK(text.rfind(std::string(kEnergyCsvHeader) + "\n", 0) == 0);
  CHECK(std::string(kEnergyCsvHeader) ==
        "step,t,E_mix,E_bulk,E_kin,E_el,E_alg,E_tot,mass,mass_drift,dE,spd_fraction,cfl,fp_iters");
  const auto rows = read_energy_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].E_tot == 1.0 / 3.0);
  CHECK(rows[0].fp_iters == 4);
  CHECK(rows[1].step == 2);
  CHECK(energy_csv_row(rows[0]).find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("checkpoint save and load") {
  const Mesh m = build_rect_mesh(4, 4, 1.0, 1.0);
  Checkpoint ck;
  ck.step = 17;
  ck.t = 1.7;
  ck.fields = sample_fields(m);
  ck.carry.mass0 = 0.4;
  ck.carry.source_acc = 2.5;
  ck.rng_state = "1 2 3";
  ck.config_text = "nx=4\n";
  ck.config_hash = fnv1a(ck.config_text);
  const fs::path dir = scratch("ck");
  save_checkpoint(ck, dir / "ck.bin");
  const Checkpoint back = load_checkpoint(dir / "ck.bin");
  CHECK(back.step == 17);
  CHECK(back.t == 1.7);
  CHECK(back.fields.phi == ck.fields.phi);
  CHECK(back.fields.u == ck.fields.u);
  CHECK(back.fields.C == ck.fields.C);
  CHECK(back.carry.source_acc == 2.5);
  CHECK(back.rng_state == "1 2 3");
  CHECK(back.config_text == ck.config_text);

  // Corruptions are detected.
  std::string bytes = slurp(dir / "ck.bin");
  {
    std::ofstream out(dir / "trunc.bin", std::ios::binary);
    out << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc.bin"), IoError);
  bytes[0] = 'X';
  {
    std::ofstream out(dir / "magic.bin", std::ios::binary);
    out << bytes;
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "magic.bin"), IoError);
  CHECK_THROWS_AS(load_checkpoint(dir / "none.bin"), IoError);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("smoke run writes one CSV row per step") {
  const fs::path dir = scratch("smoke");
  RunConfig cfg = parse_config(small_run_config(10));
  cfg.output_dir = dir.string();
  const RunSummary s = run_simulation(cfg, small_run_config(10));
  CHECK(s.steps == 10);
  const auto rows = read_energy_csv(dir / "energy.csv");
  REQUIRE(rows.size() == 10);
  for (size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].step == static_cast<int>(k) + 1);
    if (k > 0) CHECK(rows[k].dE == doctest::Approx(rows[k].E_tot - rows[k - 1].E_tot).epsilon(1e-12));
    CHECK(std::abs(rows[k].mass - rows[0].mass) <= 1e-8);
  }
  CHECK(fs::exists(dir / "checkpoint.bin"));
}

TEST_CASE("restart from a checkpoint is bitwise identical") {
  const std::string text = small_run_config(10);
  Simulation full(parse_config(text), text);
  Checkpoint mid;
  for (int k = 0; k < 10; ++k) {
    if (k == 5) mid = full.checkpoint();
    full.step();
  }
  const fs::path dir = scratch("restart");
  save_checkpoint(mid, dir / "ck.bin");
  Simulation resumed(load_checkpoint(dir / "ck.bin"));
  CHECK(resumed.step_index() == 5);
  while (resumed.step_index() < 10) resumed.step();
  CHECK(resumed.fields().phi == full.fields().phi);
  CHECK(resumed.fields().q == full.fields().q);
  CHECK(resumed.fields().u == full.fields().u);
  CHECK(resumed.fields().p == full.fields().p);
  CHECK(resumed.fields().C == full.fields().C);

  Simulation again(parse_config(text), text);
  for (int k = 0; k < 10; ++k) {
    if (k == 5) again.checkpoint();
    again.step();
  }
  CHECK(again.fields().phi == full.fields().phi);
  CHECK(again.fields().C == full.fields().C);
}

TEST_CASE("resume continues the energy log") {
  const fs::path dir = scratch("resume");
  const std::string text = small_run_config(6, "checkpoint_every=3\n");
  RunConfig cfg = parse_config(text);
  cfg.output_dir = dir.string();
  run_simulation(cfg, text);
  const auto first = read_energy_csv(dir / "energy.csv");
  REQUIRE(first.size() == 6);
  // Rewind to step 3 by re-running the first half, then resume to the end.
  Simulation sim(parse_config(text), text);
  for (int k = 0; k < 3; ++k) sim.step();
  save_checkpoint(sim.checkpoint(), dir / "checkpoint.bin");
  resume_simulation(dir / "checkpoint.bin");
  const auto rows = read_energy_csv(dir / "energy.csv");
  REQUIRE(rows.size() == 6);
  for (size_t k = 0; k < 6; ++k) CHECK(rows[k].E_tot == first[k].E_tot);
}

TEST_CASE("gradient-flow run: frozen velocity and kappa = 0") {
  const std::string text = small_run_config(20, "freeze_velocity=true\nkappa=0\nnoise_amplitude=0.05\n");
  Simulation sim(parse_config(text), text);
  auto energy = [&] {
    const EnergyReport r = sim.current_report();
    return r.E_mix + r.E_bulk;
  };
  double prev = energy();
  for (int k = 0; k < 20; ++k) {
    sim.step();
    for (double v : sim.fields().u.x.values) CHECK(v == 0.0);
    const double e = energy();
    CHECK(e < prev);
    prev = e;
  }
}
