#include "polarfft/output.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "polarfft/errors.hpp"
#include "polarfft/plasticity.hpp"

namespace polarfft {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kComponents[9] = {"11", "12", "13", "21", "22", "23", "31", "32", "33"};

}  // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
  for (const auto& m : table.metadata) os << "# " << m << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    os << (i ? "," : "") << table.header[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(f, table);
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<std::string> report_columns() {
  std::vector<std::string> c{"t"};
  for (const char* prefix : {"E", "G", "T", "M"}) {
    for (const char* k : kComponents) c.push_back(std::string(prefix) + k);
  }
  for (const char* n : {"T_eq", "M_eq", "P", "Q", "iterations", "err", "dissipation"}) {
    c.push_back(n);
  }
  return c;
}

CsvTable report_table(const std::vector<StepReport>& steps, double start_time) {
  CsvTable t;
  t.header = report_columns();
  auto row = [](const StepReport& s) {
    std::vector<double> r{s.time};
    for (const Tensor2* x : {&s.E, &s.Gamma, &s.T, &s.M}) r.insert(r.end(), x->v.begin(), x->v.end());
    r.insert(r.end(), {s.T_eq, s.M_eq, s.P, s.Q, static_cast<double>(s.iterations), s.error,
                       s.dissipation});
    return r;
  };
  StepReport origin;
  origin.time = start_time;
  t.rows.push_back(row(origin));
  for (const auto& s : steps) t.rows.push_back(row(s));
  return t;
}

std::vector<VtkField> snapshot_fields(const VoxelGrid& grid, const MaterialTable& materials,
                                      const std::vector<PointState>& points,
                                      const std::vector<std::string>& names) {
  if (points.size() != grid.voxels()) {
    throw ConfigError("snapshot has " + std::to_string(points.size()) + " voxels, grid has " +
                      std::to_string(grid.voxels()));
  }
  std::vector<VtkField> out;
  const std::size_t n = points.size();
  auto tensor_of = [](const PointState& s, char c) -> const Tensor2* {
    switch (c) {
      case 'e': return &s.e;
      case 'g': return &s.g;
      case 't': return &s.t;
      case 'm': return &s.m;
      default: return nullptr;
    }
  };
  auto is_tensor = [](char c) { return c == 'e' || c == 'g' || c == 't' || c == 'm'; };
  for (const auto& name : names) {
    VtkField f;
    f.name = name;
    if (name == "p" || name == "q" || name == "t_eq" || name == "m_eq" || name == "phase") {
      f.values.resize(n);
      for (std::size_t x = 0; x < n; ++x) {
        const PointState& s = points[x];
        const PhaseParams& p = materials[grid.phase[x]];
        if (name == "p") f.values[x] = s.p;
        else if (name == "q") f.values[x] = s.q;
        else if (name == "t_eq") f.values[x] = equivalent_stress(p, s.t);
        else if (name == "m_eq") f.values[x] = equivalent_couple_stress(p, s.m);
        else f.values[x] = grid.phase[x];
      }
    } else if (name.size() == 1 && is_tensor(name[0])) {
      f.components = 9;
      f.values.reserve(9 * n);
      for (const auto& s : points) {
        const Tensor2& t = *tensor_of(s, name[0]);
        f.values.insert(f.values.end(), t.v.begin(), t.v.end());
      }
    } else if (name.size() == 3 && is_tensor(name[0]) && name[1] >= '1' &&
               name[1] <= '3' && name[2] >= '1' && name[2] <= '3') {
      const int k = name[1] - '1', l = name[2] - '1';
      f.values.resize(n);
      for (std::size_t x = 0; x < n; ++x) f.values[x] = (*tensor_of(points[x], name[0]))(k, l);
    } else {
      throw ConfigError("unknown VTK field '" + name +
                        "' (expected p, q, t_eq, m_eq, phase, e, g, t, m or a component like t12)");
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::string vtk_string(const VoxelGrid& grid, const std::vector<VtkField>& fields,
                       const std::string& title) {
  std::ostringstream os;
  const std::size_t n = grid.voxels();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << grid.dims[0] + 1 << ' ' << grid.dims[1] + 1 << ' ' << grid.dims[2] + 1
     << '\n';
  os << "ORIGIN 0 0 0\n";
  os << "SPACING";
  for (int d = 0; d < 3; ++d) os << ' ' << fmt(grid.lengths[d] / grid.dims[d]);
  os << '\n';
  if (fields.empty()) return os.str();
  os << "CELL_DATA " << n << '\n';
  for (const auto& f : fields) {
    if ((f.components != 1 && f.components != 9) ||
        f.values.size() != n * static_cast<std::size_t>(f.components)) {
      throw ConfigError("VTK field '" + f.name + "' does not match the grid");
    }
    if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
      throw ConfigError("VTK field names must be non-empty without whitespace");
    }
    if (f.components == 1) {
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) os << fmt(v) << '\n';
    } else {
      os << "TENSORS " << f.name << " double\n";
      for (std::size_t x = 0; x < n; ++x) {
        for (int r = 0; r < 3; ++r) {
          const double* v = &f.values[9 * x + 3 * r];
          os << fmt(v[0]) << ' ' << fmt(v[1]) << ' ' << fmt(v[2]) << '\n';
        }
      }
    }
  }
  return os.str();
}

void write_vtk(const VoxelGrid& grid, const std::vector<VtkField>& fields,
               const std::filesystem::path& path, const std::string& title) {
  const std::string text = vtk_string(grid, fields, title);
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

VtkHeader parse_vtk_header(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) throw IoError(std::string("VTK: missing ") + what);
    return line;
  };
  if (next("version line").rfind("# vtk DataFile Version", 0) != 0) {
    throw IoError("VTK: not a legacy VTK file");
  }
  VtkHeader h;
  h.title = next("title");
  if (next("format") != "ASCII") throw IoError("VTK: only ASCII files are supported");
  if (next("dataset") != "DATASET STRUCTURED_POINTS") {
    throw IoError("VTK: expected DATASET STRUCTURED_POINTS");
  }
  bool have_dims = false, have_origin = false, have_spacing = false;
  std::size_t expected_values = 0;
  int pending_rows = 0;
  while (std::getline(is, line)) {
    if (pending_rows > 0) {
      --pending_rows;
      continue;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "DIMENSIONS") {
      ls >> h.point_dims[0] >> h.point_dims[1] >> h.point_dims[2];
      have_dims = static_cast<bool>(ls);
    } else if (key == "ORIGIN") {
      ls >> h.origin[0] >> h.origin[1] >> h.origin[2];
      have_origin = static_cast<bool>(ls);
    } else if (key == "SPACING") {
      ls >> h.spacing[0] >> h.spacing[1] >> h.spacing[2];
      have_spacing = static_cast<bool>(ls);
    } else if (key == "CELL_DATA") {
      ls >> h.cells;
      if (!ls) throw IoError("VTK: malformed CELL_DATA line");
    } else if (key == "SCALARS" || key == "TENSORS") {
      std::string name;
      ls >> name;
      if (!ls || h.cells == 0) throw IoError("VTK: field declared before CELL_DATA");
      h.fields.push_back(name);
      if (key == "SCALARS") {
        next("lookup table");
        expected_values = h.cells;
      } else {
        expected_values = 3 * h.cells;
      }
      pending_rows = static_cast<int>(expected_values);
    } else {
      throw IoError("VTK: unexpected line '" + line + "'");
    }
  }
  if (pending_rows > 0) throw IoError("VTK: truncated field data");
  if (!have_dims || !have_origin || !have_spacing) throw IoError("VTK: incomplete geometry header");
  const std::size_t cells = static_cast<std::size_t>(h.point_dims[0] - 1) *
                            static_cast<std::size_t>(h.point_dims[1] - 1) *
                            static_cast<std::size_t>(h.point_dims[2] - 1);
  if (h.cells != 0 && h.cells != cells) throw IoError("VTK: CELL_DATA count disagrees with DIMENSIONS");
  return h;
}

}  // namespace polarfft
