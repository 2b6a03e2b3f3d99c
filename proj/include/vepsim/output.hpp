#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vepsim/diagnostics.hpp"
#include "vepsim/fields.hpp"
#include "vepsim/mesh.hpp"

namespace vepsim {

/// Nodal fields of one time level.
struct FieldSet {
  ScalarField phi;
  ScalarField q;
  ScalarField mu;
  ScalarField p;
  VectorField u;
  TensorField C;
};

/// Legacy ASCII VTK unstructured grid with point data phi, q, mu, p, u and C.
/// Throws IoError when the file cannot be written.
void write_fields_vtk(const FieldSet& fields, const Mesh& mesh, const std::filesystem::path& path);

/// Minimal reader for files produced by write_fields_vtk.
struct VtkContents {
  int num_points = 0;
  int num_cells = 0;
  std::vector<double> points;  // x, y, z triples
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<std::pair<std::string, std::vector<double>>> vectors;  // 3 per point
  std::vector<std::pair<std::string, std::vector<double>>> tensors;  // 9 per point

  const std::vector<double>& scalar(const std::string& name) const;
};
VtkContents read_vtk(const std::filesystem::path& path);

extern const char* const kEnergyCsvHeader;

/// Appends one row; writes the header first when the file is new or empty.
void append_energy_csv(const EnergyReport& report, const std::filesystem::path& path);
/// One CSV row (no newline) with 17 significant digits.
std::string energy_csv_row(const EnergyReport& report);
/// Parses a CSV written by append_energy_csv (header required).
std::vector<EnergyReport> read_energy_csv(const std::filesystem::path& path);

}  // namespace vepsim
