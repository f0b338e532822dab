#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polarfft/material.hpp"
#include "polarfft/microstructure.hpp"
#include "polarfft/solver.hpp"

namespace polarfft {

/// Plain numeric table written as CSV: `# ` metadata lines, one header row,
/// then rows formatted with %.17g.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Column names of the step report: t, E11..E33, G11..G33, T11..T33,
/// M11..M33, T_eq, M_eq, P, Q, iterations, err, dissipation.
std::vector<std::string> report_columns();

/// Step report with a leading row for the natural state at t = 0.
CsvTable report_table(const std::vector<StepReport>& steps, double start_time = 0.0);

struct VtkField {
  std::string name;
  int components = 1;  ///< 1 (scalar) or 9 (tensor, row-major)
  std::vector<double> values;
};

/// Builds cell fields from voxel states. Known names: p, q, t_eq, m_eq,
/// phase, e, g, t, m (tensors) and single components such as t12 or g31.
/// Throws ConfigError for unknown names.
std::vector<VtkField> snapshot_fields(const VoxelGrid& grid, const MaterialTable& materials,
                                      const std::vector<PointState>& points,
                                      const std::vector<std::string>& names);

/// Legacy ASCII STRUCTURED_POINTS file with CELL_DATA. Throws ConfigError if
/// a field does not match the grid.
std::string vtk_string(const VoxelGrid& grid, const std::vector<VtkField>& fields,
                       const std::string& title = "polarfft");
/// Throws IoError on write failure.
void write_vtk(const VoxelGrid& grid, const std::vector<VtkField>& fields,
               const std::filesystem::path& path, const std::string& title = "polarfft");

struct VtkHeader {
  std::string title;
  std::array<int, 3> point_dims{};
  std::array<double, 3> spacing{};
  std::array<double, 3> origin{};
  std::size_t cells = 0;
  std::vector<std::string> fields;  ///< names in file order
};

/// Reads the structural header and field declarations of a file written by
/// write_vtk. Throws IoError on anything else.
VtkHeader parse_vtk_header(const std::string& text);

}  // namespace polarfft
