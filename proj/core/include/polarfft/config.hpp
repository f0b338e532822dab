#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polarfft/material.hpp"
#include "polarfft/microstructure.hpp"
#include "polarfft/solver.hpp"

namespace polarfft {

/// Flat key/value configuration. Keys are dotted (`solver.epsilon`); a
/// `[section]` line prefixes the keys that follow with `section.`.
class ConfigMap {
 public:
  ConfigMap() = default;

  /// Throws ConfigError with the line number on malformed input or a
  /// repeated key.
  static ConfigMap parse(const std::string& text, const std::string& origin = "<string>");
  /// Throws IoError if the file cannot be read.
  static ConfigMap load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  /// Entries of `other` replace entries of this map.
  void merge(const ConfigMap& other);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Whitespace- or comma-separated list.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<long> get_ints(const std::string& key) const;
  std::vector<long> get_ints(const std::string& key, std::vector<long> fallback) const;

  /// Keys with the given prefix (including the trailing dot).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  /// Keys never read through a getter.
  std::vector<std::string> unused_keys() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Directory used to resolve relative paths.
  std::filesystem::path base_dir;

 private:
  const std::string& require(const std::string& key) const;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

struct OutputSpec {
  std::string report = "report.csv";
  std::vector<int> snapshot_steps;
  std::vector<int> vtk_steps;
  std::vector<std::string> vtk_fields{"p", "q", "t_eq", "m_eq"};
};

/// Fully resolved inputs of one solver run.
struct RunConfig {
  std::string name;
  std::string provenance;
  VoxelGrid grid;
  MaterialTable materials;
  LoadingPath loading;
  SolverConfig solver;
  OutputSpec output;
  /// Keys given by the caller (not the preset) that no builder read.
  std::vector<std::string> unused_keys;
};

VoxelGrid build_geometry(const ConfigMap& cfg, std::optional<std::uint64_t> seed_override = {});
MaterialTable build_materials(const ConfigMap& cfg);
LoadingPath build_loading(const ConfigMap& cfg);
SolverConfig build_solver_config(const ConfigMap& cfg);
OutputSpec build_output(const ConfigMap& cfg);

/// Resolves a preset (key `preset`) underneath the given keys, then builds
/// and cross-validates every section.
RunConfig build_run_config(const ConfigMap& cfg, std::optional<std::uint64_t> seed_override = {});

/// Reads a 19-column loading table: t, E11..E33, G11..G33 (comma or
/// whitespace separated, `#` comments, optional header row).
LoadingPath load_loading_table(const std::filesystem::path& path);

/// Parses component keys like `12` (1-based) into (0, 1).
std::pair<int, int> parse_component(const std::string& s);

}  // namespace polarfft
