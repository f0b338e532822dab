#include "polarfft/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "polarfft/errors.hpp"
#include "polarfft/experiments.hpp"

namespace polarfft {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end && *end == '\0';
}

ConfigError bad_value(const std::string& key, const std::string& value, const char* expected) {
  return ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

std::array<int, 3> dims3(const ConfigMap& cfg, const std::string& key, std::vector<long> fallback) {
  const auto v = cfg.get_ints(key, std::move(fallback));
  if (v.size() != 3) throw ConfigError("config key '" + key + "' needs three integers");
  for (long x : v)
    if (x < 1) throw ConfigError("config key '" + key + "' entries must be >= 1");
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

Vec3 vec3(const ConfigMap& cfg, const std::string& key, std::vector<double> fallback) {
  const auto v = cfg.get_doubles(key, std::move(fallback));
  if (v.size() != 3) throw ConfigError("config key '" + key + "' needs three numbers");
  return {v[0], v[1], v[2]};
}

std::uint8_t phase_id(const ConfigMap& cfg, const std::string& key, long fallback) {
  const long id = cfg.get_int(key, fallback);
  if (id < 0 || id > 255) throw ConfigError("config key '" + key + "' must be a phase ID in [0, 255]");
  return static_cast<std::uint8_t>(id);
}

Tensor2 rate_tensor(const ConfigMap& cfg, const std::string& prefix) {
  Tensor2 t;
  for (const auto& key : cfg.keys_with_prefix(prefix)) {
    const auto [k, l] = parse_component(key.substr(prefix.size()));
    t(k, l) = cfg.get_double(key);
  }
  return t;
}

double* phase_field(PhaseParams& p, const std::string& name) {
  if (name == "lambda") return &p.lambda;
  if (name == "mu") return &p.mu;
  if (name == "kappa") return &p.kappa;
  if (name == "alpha") return &p.alpha;
  if (name == "beta") return &p.beta;
  if (name == "gamma") return &p.gamma;
  if (name == "t_yield") return &p.t_yield;
  if (name == "t_hardening") return &p.t_hardening;
  if (name == "m_yield") return &p.m_yield;
  if (name == "m_hardening") return &p.m_hardening;
  if (name == "a1") return &p.a1;
  if (name == "b1") return &p.b1;
  return nullptr;
}

constexpr const char* kPhaseFields[] = {"lambda",  "mu",          "kappa",   "alpha",
                                        "beta",    "gamma",       "t_yield", "t_hardening",
                                        "m_yield", "m_hardening", "a1",      "b1"};

std::filesystem::path resolve(const ConfigMap& cfg, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !cfg.base_dir.empty()) path = cfg.base_dir / path;
  return path;
}

}  // namespace

std::pair<int, int> parse_component(const std::string& s) {
  if (s.size() != 2 || s[0] < '1' || s[0] > '3' || s[1] < '1' || s[1] > '3') {
    throw ConfigError("tensor component '" + s + "' must be two digits in 1..3, e.g. 12");
  }
  return {s[0] - '1', s[1] - '1'};
}

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap cfg;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return origin + ":" + std::to_string(line_no); };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where() + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + ": missing key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) {
        throw ConfigError(where() + ": invalid character in key '" + key + "'");
      }
    }
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) throw ConfigError(where() + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  ConfigMap cfg = parse(ss.str(), path.string());
  cfg.base_dir = path.parent_path();
  return cfg;
}

void ConfigMap::merge(const ConfigMap& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
  if (!other.base_dir.empty()) base_dir = other.base_dir;
}

const std::string& ConfigMap::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key) const { return require(key); }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? require(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string& v = require(key);
  double d;
  if (!parse_double(v, d)) throw bad_value(key, v, "a number");
  return d;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key) const {
  const std::string& v = require(key);
  long d;
  if (!parse_long(v, d)) throw bad_value(key, v, "an integer");
  return d;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = require(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw bad_value(key, v, "true or false");
}

std::vector<double> ConfigMap::get_doubles(const std::string& key) const {
  const std::string& v = require(key);
  std::vector<double> out;
  for (const auto& t : tokens(v)) {
    double d;
    if (!parse_double(t, d)) throw bad_value(key, v, "a list of numbers");
    out.push_back(d);
  }
  return out;
}

std::vector<double> ConfigMap::get_doubles(const std::string& key,
                                           std::vector<double> fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<long> ConfigMap::get_ints(const std::string& key) const {
  const std::string& v = require(key);
  std::vector<long> out;
  for (const auto& t : tokens(v)) {
    long d;
    if (!parse_long(t, d)) throw bad_value(key, v, "a list of integers");
    out.push_back(d);
  }
  return out;
}

std::vector<long> ConfigMap::get_ints(const std::string& key, std::vector<long> fallback) const {
  return has(key) ? get_ints(key) : fallback;
}

std::vector<std::string> ConfigMap::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    out.push_back(it->first);
  }
  return out;
}

std::vector<std::string> ConfigMap::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

VoxelGrid build_geometry(const ConfigMap& cfg, std::optional<std::uint64_t> seed_override) {
  const std::string kind = cfg.get_string("geometry.kind", "laminate");
  if (kind == "file") {
    VoxelGrid g = load_voxels(resolve(cfg, cfg.get_string("geometry.path")));
    return g;
  }
  const auto dims = dims3(cfg, "geometry.dims", {4, 4, 4});
  const Vec3 lengths = vec3(cfg, "geometry.lengths", {1.0, 1.0, 1.0});
  if (kind == "uniform") return VoxelGrid(dims, lengths, phase_id(cfg, "geometry.phase", 0));
  if (kind == "laminate") {
    const long axis = cfg.get_int("geometry.axis", kStudyLaminateNormal + 1);
    if (axis < 1 || axis > 3) throw ConfigError("geometry.axis must be 1, 2 or 3");
    return gen_laminate(dims, cfg.get_double("geometry.volume_fraction", 0.5),
                        static_cast<int>(axis - 1), lengths)
        .grid;
  }
  if (kind == "cube") {
    const auto inner = dims3(cfg, "geometry.inner", {2, 2, 2});
    return gen_centered_cube(dims, inner, lengths, phase_id(cfg, "geometry.inner_phase", 0),
                             phase_id(cfg, "geometry.outer_phase", 1));
  }
  std::vector<Sphere> spheres;
  if (kind == "spheres") {
    std::string spec = cfg.get_string("geometry.spheres");
    std::replace(spec.begin(), spec.end(), ';', '\n');
    std::istringstream is(spec);
    std::string group;
    while (std::getline(is, group)) {
      const auto t = tokens(group);
      if (t.empty()) continue;
      double v[4];
      if (t.size() != 4 || !parse_double(t[0], v[0]) || !parse_double(t[1], v[1]) ||
          !parse_double(t[2], v[2]) || !parse_double(t[3], v[3])) {
        throw bad_value("geometry.spheres", group, "'x y z r' groups separated by ';'");
      }
      spheres.push_back({{v[0], v[1], v[2]}, v[3]});
    }
  } else if (kind == "random_spheres") {
    const std::uint64_t seed =
        seed_override ? *seed_override : static_cast<std::uint64_t>(cfg.get_int("geometry.seed", 1));
    spheres = random_spheres(static_cast<int>(cfg.get_int("geometry.count", 10)),
                             cfg.get_double("geometry.volume_fraction", 0.2), seed, lengths,
                             cfg.get_bool("geometry.planar", dims[2] == 1));
  } else if (kind == "four_spheres") {
    spheres = four_spheres(cfg.get_double("geometry.volume_fraction", 0.2), lengths);
  } else {
    throw ConfigError("unknown geometry.kind '" + kind +
                      "' (expected laminate, cube, spheres, random_spheres, four_spheres, "
                      "uniform or file)");
  }
  return gen_spheres(dims, spheres, lengths, phase_id(cfg, "geometry.inclusion_phase", 1),
                     phase_id(cfg, "geometry.matrix_phase", 0));
}

MaterialTable build_materials(const ConfigMap& cfg) {
  MaterialTable table;
  if (cfg.has("material.preset")) {
    table = presets::by_name(cfg.get_string("material.preset"));
  } else {
    const long n = cfg.get_int("material.phases");
    if (n < 1 || n > 256) throw ConfigError("material.phases must lie in [1, 256]");
    table.name = "inline";
    table.phases.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      for (const char* field : kPhaseFields) {
        const std::string key = "material.phase" + std::to_string(i) + "." + field;
        if (!cfg.has(key) && std::string(field) == "alpha") continue;
        *phase_field(table.phases[static_cast<std::size_t>(i)], field) = cfg.get_double(key);
      }
    }
  }
  for (const auto& key : cfg.keys_with_prefix("material.phase")) {
    if (key == "material.phases") continue;
    const auto dot = key.find('.', std::string("material.phase").size());
    if (dot == std::string::npos) throw ConfigError("malformed material key '" + key + "'");
    long id;
    if (!parse_long(key.substr(14, dot - 14), id) || id < 0 ||
        static_cast<std::size_t>(id) >= table.size()) {
      throw ConfigError("material key '" + key + "' names a phase outside the table");
    }
    double* field = phase_field(table.phases[static_cast<std::size_t>(id)], key.substr(dot + 1));
    if (!field) throw ConfigError("unknown material parameter in '" + key + "'");
    *field = cfg.get_double(key);
  }
  table.validate(true);
  return table;
}

LoadingPath build_loading(const ConfigMap& cfg) {
  const std::string kind = cfg.get_string("loading.kind", "constant");
  if (kind == "table") return load_loading_table(resolve(cfg, cfg.get_string("loading.table")));
  const Tensor2 E_rate = rate_tensor(cfg, "loading.E_rate.");
  const Tensor2 G_rate = rate_tensor(cfg, "loading.Gamma_rate.");
  const double dt = cfg.get_double("loading.dt", 0.01);
  if (kind == "constant") {
    const long steps = cfg.get_int("loading.steps", 100);
    if (steps < 0) throw ConfigError("loading.steps must be non-negative");
    return LoadingPath::constant_rate(E_rate, G_rate, dt, static_cast<int>(steps));
  }
  if (kind == "cyclic") {
    const long cycles = cfg.get_int("loading.cycles", 10);
    return LoadingPath::cyclic(E_rate, G_rate, dt, cfg.get_double("loading.period", 1.0),
                               static_cast<int>(cycles));
  }
  throw ConfigError("unknown loading.kind '" + kind + "' (expected constant, cyclic or table)");
}

SolverConfig build_solver_config(const ConfigMap& cfg) {
  SolverConfig s;
  s.epsilon = cfg.get_double("solver.epsilon", s.epsilon);
  const std::string kind = cfg.get_string("solver.error", "local");
  if (kind == "local") {
    s.error_kind = ErrorKind::Local;
  } else if (kind == "average") {
    s.error_kind = ErrorKind::Average;
  } else {
    throw ConfigError("solver.error must be 'local' or 'average', got '" + kind + "'");
  }
  s.max_iterations = static_cast<int>(cfg.get_int("solver.max_iterations", s.max_iterations));
  s.validate();
  return s;
}

OutputSpec build_output(const ConfigMap& cfg) {
  OutputSpec o;
  o.report = cfg.get_string("output.report", o.report);
  for (long s : cfg.get_ints("output.snapshot_steps", {})) o.snapshot_steps.push_back(static_cast<int>(s));
  for (long s : cfg.get_ints("output.vtk_steps", {})) o.vtk_steps.push_back(static_cast<int>(s));
  if (cfg.has("output.vtk_fields")) {
    o.vtk_fields.clear();
    std::istringstream is(cfg.get_string("output.vtk_fields"));
    std::string w;
    while (is >> w) o.vtk_fields.push_back(w);
  }
  return o;
}

RunConfig build_run_config(const ConfigMap& user, std::optional<std::uint64_t> seed_override) {
  const ConfigMap cfg = resolve_preset(user);
  RunConfig rc;
  rc.name = cfg.get_string("name", cfg.get_string("preset", "custom"));
  rc.provenance = cfg.get_string("provenance", "");
  rc.grid = build_geometry(cfg, seed_override);
  rc.materials = build_materials(cfg);
  rc.loading = build_loading(cfg);
  rc.solver = build_solver_config(cfg);
  rc.output = build_output(cfg);
  if (static_cast<std::size_t>(rc.grid.max_phase()) >= rc.materials.size()) {
    throw ConfigError("geometry uses phase ID " + std::to_string(rc.grid.max_phase()) +
                      " but material table '" + rc.materials.name + "' has only " +
                      std::to_string(rc.materials.size()) + " phases");
  }
  rc.loading.validate();
  for (const auto& key : cfg.unused_keys()) {
    if (user.has(key) && key != "preset") rc.unused_keys.push_back(key);
  }
  for (int s : rc.output.snapshot_steps) {
    if (s < 0 || s > rc.loading.steps()) {
      throw ConfigError("snapshot step " + std::to_string(s) + " outside [0, " +
                        std::to_string(rc.loading.steps()) + "]");
    }
  }
  for (int s : rc.output.vtk_steps) {
    if (s < 0 || s > rc.loading.steps()) {
      throw ConfigError("vtk step " + std::to_string(s) + " outside [0, " +
                        std::to_string(rc.loading.steps()) + "]");
    }
  }
  return rc;
}

LoadingPath load_loading_table(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open loading table " + path.string());
  LoadingPath lp;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = tokens(line);
    if (t.empty()) continue;
    double first;
    if (lp.times.empty() && !parse_double(t[0], first)) continue;  // header row
    if (t.size() != 19) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 19 columns, found " +
                    std::to_string(t.size()));
    }
    double v[19];
    for (int i = 0; i < 19; ++i) {
      if (!parse_double(t[static_cast<std::size_t>(i)], v[i])) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-numeric entry '" +
                      t[static_cast<std::size_t>(i)] + "'");
      }
    }
    Tensor2 E, G;
    for (int i = 0; i < 9; ++i) {
      E[static_cast<std::size_t>(i)] = v[1 + i];
      G[static_cast<std::size_t>(i)] = v[10 + i];
    }
    lp.times.push_back(v[0]);
    lp.E.push_back(E);
    lp.Gamma.push_back(G);
  }
  lp.validate();
  return lp;
}

}  // namespace polarfft
