#include "vepsim/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vepsim/error.hpp"

namespace vepsim {

const char* const kEnergyCsvHeader =
    "step,t,E_mix,E_bulk,E_kin,E_el,E_alg,E_tot,mass,mass_drift,dE,spd_fraction,cfl,fp_iters";

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_fields_vtk(const FieldSet& f, const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const int n = mesh.num_nodes();
  out << "# vtk DataFile Version 3.0\nvepsim fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const Point& p : mesh.nodes()) out << num(p.x) << ' ' << num(p.y) << " 0\n";
  out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const Triangle& t : mesh.elements()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) out << "5\n";
  out << "POINT_DATA " << n << '\n';
  const std::pair<const char*, const ScalarField*> scalars[] = {
      {"phi", &f.phi}, {"q", &f.q}, {"mu", &f.mu}, {"p", &f.p}};
  for (const auto& [name, field] : scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << num(field->size() == n ? (*field)[i] : 0.0) << '\n';
  }
  out << "VECTORS u double\n";
  for (int i = 0; i < n; ++i) {
    const bool has = f.u.size() == n;
    out << num(has ? f.u.x[i] : 0.0) << ' ' << num(has ? f.u.y[i] : 0.0) << " 0\n";
  }
  out << "TENSORS C double\n";
  for (int i = 0; i < n; ++i) {
    const Tensor2 c = f.C.size() == n ? f.C.at(i) : Tensor2{};
    out << num(c.xx) << ' ' << num(c.xy) << " 0\n"
        << num(c.xy) << ' ' << num(c.yy) << " 0\n0 0 0\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

const std::vector<double>& VtkContents::scalar(const std::string& name) const {
  for (const auto& [n, v] : scalars) {
    if (n == name) return v;
  }
  throw DomainError("no scalar field '" + name + "' in VTK file");
}

VtkContents read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  VtkContents c;
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw IoError("not a legacy VTK file");
  std::getline(in, line);  // title
  std::string word;
  auto read_values = [&](std::vector<double>& v, size_t count) {
    v.resize(count);
    for (double& x : v) {
      if (!(in >> x)) throw IoError("truncated VTK data in " + path.string());
    }
  };
  while (in >> word) {
    if (word == "POINTS") {
      std::string type;
      in >> c.num_points >> type;
      read_values(c.points, 3 * static_cast<size_t>(c.num_points));
    } else if (word == "CELLS") {
      int total = 0;
      in >> c.num_cells >> total;
      std::vector<double> skip;
      read_values(skip, static_cast<size_t>(total));
    } else if (word == "CELL_TYPES") {
      int count = 0;
      in >> count;
      std::vector<double> skip;
      read_values(skip, static_cast<size_t>(count));
    } else if (word == "SCALARS") {
      std::string name, type, lut, lut_name;
      int comps = 1;
      in >> name >> type >> comps >> lut >> lut_name;
      std::vector<double> v;
      read_values(v, static_cast<size_t>(c.num_points));
      c.scalars.emplace_back(name, std::move(v));
    } else if (word == "VECTORS" || word == "TENSORS") {
      std::string name, type;
      in >> name >> type;
      std::vector<double> v;
      const size_t per = word == "VECTORS" ? 3 : 9;
      read_values(v, per * c.num_points);
      (word == "VECTORS" ? c.vectors : c.tensors).emplace_back(name, std::move(v));
    }
  }
  return c;
}

std::string energy_csv_row(const EnergyReport& r) {
  std::string s = std::to_string(r.step);
  for (double v : {r.t, r.E_mix, r.E_bulk, r.E_kin, r.E_el, r.E_alg, r.E_tot, r.mass, r.mass_drift,
                   r.dE, r.spd_fraction, r.cfl}) {
    s += ',';
    s += num(v);
  }
  s += ',' + std::to_string(r.fp_iters);
  return s;
}

void append_energy_csv(const EnergyReport& report, const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path.string() + " for appending");
  if (fresh) out << kEnergyCsvHeader << '\n';
  out << energy_csv_row(report) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<EnergyReport> read_energy_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kEnergyCsvHeader) throw IoError("bad energy CSV header");
  std::vector<EnergyReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 14) throw IoError("bad energy CSV row: " + line);
    EnergyReport r;
    r.step = std::stoi(cols[0]);
    double* targets[] = {&r.t,     &r.E_mix, &r.E_bulk, &r.E_kin,      &r.E_el, &r.E_alg,
                         &r.E_tot, &r.mass,  &r.mass_drift, &r.dE, &r.spd_fraction, &r.cfl};
    for (int k = 0; k < 12; ++k) *targets[k] = std::stod(cols[k + 1]);
    r.fp_iters = std::stoi(cols[13]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace vepsim
