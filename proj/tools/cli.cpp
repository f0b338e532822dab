#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "polarfft/config.hpp"
#include "polarfft/errors.hpp"
#include "polarfft/experiments.hpp"
#include "polarfft/output.hpp"
#include "polarfft/parallel.hpp"
#include "polarfft/verification.hpp"

namespace polarfft::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

void apply_threads(const Options& o) {
  int n = 1;
  if (o.threads) {
    n = *o.threads;
  } else if (const char* env = std::getenv("POLARFFT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (!end || *end != '\0' || v < 1) {
      throw ConfigError(std::string("POLARFFT_THREADS must be a positive integer, got '") + env + "'");
    }
    n = static_cast<int>(v);
  }
  if (n < 1) throw ConfigError("--threads must be >= 1");
  set_thread_count(n);
}

/// User keys from --config, with --preset (or the command default) on top.
ConfigMap user_config(const Options& o, const std::string& default_preset) {
  ConfigMap cfg;
  if (o.config) cfg = ConfigMap::load(*o.config);
  if (o.preset) {
    cfg.set("preset", *o.preset);
  } else if (!cfg.has("preset") && !default_preset.empty() && !o.config) {
    cfg.set("preset", default_preset);
  }
  if (!o.snapshot_steps.empty()) cfg.set("output.snapshot_steps", join(o.snapshot_steps));
  return resolve_preset(cfg);
}

std::vector<std::string> header_lines(const std::string& command, const ConfigMap& cfg) {
  std::vector<std::string> m{"polarfft " + command};
  if (cfg.has("name")) m.push_back("preset = " + cfg.get_string("name"));
  if (cfg.has("provenance")) m.push_back("provenance = " + cfg.get_string("provenance"));
  return m;
}

std::string describe(const VoxelGrid& g) {
  std::ostringstream os;
  os << "geometry = " << g.dims[0] << "x" << g.dims[1] << "x" << g.dims[2] << " voxels, lengths "
     << num(g.lengths[0]) << " " << num(g.lengths[1]) << " " << num(g.lengths[2]);
  for (int id = 0; id <= g.max_phase(); ++id) {
    os << ", phase " << id << " fraction " << num(g.volume_fraction(static_cast<std::uint8_t>(id)));
  }
  return os.str();
}

std::string describe(const SolverConfig& s) {
  return "solver = epsilon " + num(s.epsilon) + ", " +
         (s.error_kind == ErrorKind::Local ? "local" : "average") + " metric, max_iterations " +
         std::to_string(s.max_iterations);
}

fs::path prepare_out(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create output directory " + o.out.string() + ": " + ec.message());
  return o.out;
}

CsvTable snapshot_table(const VoxelGrid& grid, const MaterialTable& mats, const Snapshot& snap) {
  CsvTable t;
  t.metadata.push_back("snapshot node " + std::to_string(snap.node) + " t = " + num(snap.time));
  t.header = {"i", "j", "k", "phase", "p", "q", "t_eq", "m_eq"};
  const char* comps[] = {"11", "12", "13", "21", "22", "23", "31", "32", "33"};
  for (const char* f : {"e", "g", "t", "m"})
    for (const char* c : comps) t.header.push_back(std::string(f) + c);
  for (int k = 0; k < grid.dims[2]; ++k) {
    for (int j = 0; j < grid.dims[1]; ++j) {
      for (int i = 0; i < grid.dims[0]; ++i) {
        const std::size_t x = grid.index(i, j, k);
        const PointState& s = snap.points[x];
        const PhaseParams& p = mats[grid.phase[x]];
        std::vector<double> row{static_cast<double>(i), static_cast<double>(j),
                                static_cast<double>(k), static_cast<double>(grid.phase[x]),
                                s.p, s.q, equivalent_stress(p, s.t),
                                equivalent_couple_stress(p, s.m)};
        for (const Tensor2* v : {&s.e, &s.g, &s.t, &s.m}) row.insert(row.end(), v->v.begin(), v->v.end());
        t.rows.push_back(std::move(row));
      }
    }
  }
  return t;
}

void warn_unused(const std::vector<std::string>& keys) {
  for (const auto& k : keys) std::cerr << "warning: config key '" << k << "' was not used\n";
}

}  // namespace

void cmd_run(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "");
  const RunConfig rc = build_run_config(cfg, o.seed);
  warn_unused(rc.unused_keys);
  const Solver solver(rc.grid, rc.materials, rc.solver);
  RunOptions ro;
  ro.snapshot_nodes = rc.output.snapshot_steps;
  ro.snapshot_nodes.insert(ro.snapshot_nodes.end(), rc.output.vtk_steps.begin(),
                           rc.output.vtk_steps.end());
  const SolverResult result = solver.run(rc.loading, ro);

  const fs::path out = prepare_out(o);
  CsvTable report = report_table(result.steps, rc.loading.times.front());
  report.metadata = header_lines("run", cfg);
  report.metadata.push_back(describe(rc.grid));
  report.metadata.push_back("material = " + rc.materials.name);
  report.metadata.push_back(describe(rc.solver));
  if (o.seed) report.metadata.push_back("seed = " + std::to_string(*o.seed));
  write_csv(out / rc.output.report, report);

  for (const auto& snap : result.snapshots) {
    const auto& ss = rc.output.snapshot_steps;
    if (std::find(ss.begin(), ss.end(), snap.node) != ss.end()) {
      write_csv(out / ("snapshot_" + std::to_string(snap.node) + ".csv"),
                snapshot_table(rc.grid, rc.materials, snap));
    }
    const auto& vs = rc.output.vtk_steps;
    if (std::find(vs.begin(), vs.end(), snap.node) != vs.end()) {
      write_vtk(rc.grid, snapshot_fields(rc.grid, rc.materials, snap.points, rc.output.vtk_fields),
                out / ("fields_" + std::to_string(snap.node) + ".vtk"),
                rc.name + " node " + std::to_string(snap.node));
    }
  }
  std::size_t iterations = 0;
  for (const auto& s : result.steps) iterations += static_cast<std::size_t>(s.iterations);
  std::cout << rc.name << ": " << result.steps.size() << " steps, " << iterations
            << " iterations, report " << (out / rc.output.report).string() << "\n";
}

void cmd_scan_lengths(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "lengths");
  LengthScanOptions scan;
  scan.grid = build_geometry(cfg, o.seed);
  scan.loading = build_loading(cfg);
  scan.solver = build_solver_config(cfg);
  scan.elastic_lengths =
      o.elastic_lengths.empty() ? cfg.get_doubles("scan.elastic_lengths") : o.elastic_lengths;
  scan.plastic_lengths =
      o.plastic_lengths.empty() ? cfg.get_doubles("scan.plastic_lengths") : o.plastic_lengths;
  const auto points = scan_lengths(scan);

  CsvTable t;
  t.metadata = header_lines("scan-lengths", cfg);
  t.metadata.push_back(describe(scan.grid));
  t.metadata.push_back("material = table3(l_e, l_p) per row");
  t.metadata.push_back(describe(scan.solver));
  t.header = {"l_e", "l_p", "T32", "M11", "iterations"};
  for (const auto& p : points) {
    t.rows.push_back({p.elastic_length, p.plastic_length, p.T32, p.M11,
                      static_cast<double>(p.iterations)});
  }
  const fs::path out = prepare_out(o);
  write_csv(out / "lengths.csv", t);
  std::cout << "length scan: " << points.size() << " points, " << (out / "lengths.csv").string()
            << "\n";
}

void cmd_bench(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "bench");
  BenchOptions b;
  if (!o.sizes.empty()) {
    b.sizes = o.sizes;
  } else {
    std::vector<int> sizes;
    for (long s : cfg.get_ints("bench.sizes", {1, 2, 4, 8, 16, 32})) sizes.push_back(static_cast<int>(s));
    b.sizes = sizes;
  }
  b.repeats = o.repeats ? *o.repeats : static_cast<int>(cfg.get_int("bench.repeats", 10));
  b.steps = static_cast<int>(cfg.get_int("loading.steps", b.steps));
  b.dt = cfg.get_double("loading.dt", b.dt);
  b.solver = build_solver_config(cfg);
  for (int n : b.sizes) {
    if (n > 0 && (n & (n - 1)) != 0) {
      std::cerr << "warning: " << n << " voxels per axis is not a power of two\n";
    }
  }
  const auto rows = bench(b);

  CsvTable t;
  t.metadata = header_lines("bench", cfg);
  t.metadata.push_back("material = table4, 50% laminate, E13' = 1, Gamma32' = 1");
  t.metadata.push_back(describe(b.solver));
  t.metadata.push_back("threads = " + std::to_string(thread_count()));
  if (rows.size() >= 3) {
    std::vector<BenchRow> top(rows.end() - 3, rows.end());
    t.metadata.push_back("nlogn slope (top three) = " + num(nlogn_slope(top)));
  }
  t.header = {"n", "voxels", "repeats", "mean_seconds", "min_seconds", "working_bytes",
              "iterations", "power_of_two"};
  for (const auto& r : rows) {
    t.rows.push_back({static_cast<double>(r.n), static_cast<double>(r.voxels),
                      static_cast<double>(r.repeats), r.mean_seconds, r.min_seconds,
                      static_cast<double>(r.working_bytes), static_cast<double>(r.iterations),
                      r.power_of_two ? 1.0 : 0.0});
  }
  const fs::path out = prepare_out(o);
  write_csv(out / "bench.csv", t);
  std::cout << "bench: " << rows.size() << " resolutions, " << (out / "bench.csv").string() << "\n";
}

void cmd_iterations(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "iterations");
  IterationsOptions it;
  it.hardening = o.hardening.empty() ? cfg.get_doubles("iterations.hardening") : o.hardening;
  const auto dims = cfg.get_ints("geometry.dims", {8, 8, 8});
  it.n = static_cast<int>(dims.front());
  it.steps = static_cast<int>(cfg.get_int("loading.steps", it.steps));
  it.dt = cfg.get_double("loading.dt", it.dt);
  it.solver = build_solver_config(cfg);
  const auto curves = iterations_vs_hardening(it);

  CsvTable t;
  t.metadata = header_lines("iterations", cfg);
  t.metadata.push_back("geometry = " + std::to_string(it.n) + "^3 50% laminate");
  t.metadata.push_back(describe(it.solver));
  t.header = {"step"};
  for (const auto& c : curves) t.header.push_back("iterations_x" + num(c.hardening));
  for (const auto& c : curves) t.header.push_back("P_x" + num(c.hardening));
  for (const auto& c : curves) t.header.push_back("Q_x" + num(c.hardening));
  for (int s = 0; s < it.steps; ++s) {
    std::vector<double> row{static_cast<double>(s + 1)};
    for (const auto& c : curves) row.push_back(c.iterations[static_cast<std::size_t>(s)]);
    for (const auto& c : curves) row.push_back(c.P[static_cast<std::size_t>(s)]);
    for (const auto& c : curves) row.push_back(c.Q[static_cast<std::size_t>(s)]);
    t.rows.push_back(std::move(row));
  }
  const fs::path out = prepare_out(o);
  write_csv(out / "iterations.csv", t);
  std::cout << "iterations: " << curves.size() << " contrasts, "
            << (out / "iterations.csv").string() << "\n";
}

void cmd_mnms_verify(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "mnms");
  const VoxelGrid grid = build_geometry(cfg, o.seed);
  const MaterialTable mats = build_materials(cfg);
  MnmsOptions m;
  m.steps = static_cast<int>(cfg.get_int("loading.steps", m.steps));
  m.dt = cfg.get_double("loading.dt", m.dt);
  m.scale = cfg.get_double("mnms.scale", m.scale);
  m.solver = build_solver_config(cfg);
  const MnmsReport r = mnms_run(grid, mats, m);

  CsvTable t;
  t.metadata = header_lines("mnms-verify", cfg);
  t.metadata.push_back(describe(grid));
  t.metadata.push_back("material = " + mats.name);
  t.metadata.push_back(describe(m.solver));
  t.metadata.push_back("max error = " + num(r.max_error));
  t.header = {"node", "t", "err_e", "err_g", "err_t", "err_m", "iterations"};
  for (const auto& s : r.steps) {
    t.rows.push_back({static_cast<double>(s.node), s.time, s.max_error[0], s.max_error[1],
                      s.max_error[2], s.max_error[3], static_cast<double>(s.iterations)});
  }
  const fs::path out = prepare_out(o);
  write_csv(out / "mnms.csv", t);
  std::cout << "mnms: max error " << num(r.max_error) << " (epsilon " << num(m.solver.epsilon)
            << "), " << (out / "mnms.csv").string() << "\n";
}

void cmd_convergence(const Options& o) {
  apply_threads(o);
  const ConfigMap cfg = user_config(o, "convergence");
  const ConvergenceGeometry kind = parse_convergence_geometry(
      o.geometry ? *o.geometry : cfg.get_string("convergence.geometry", "laminate50"));
  std::vector<int> space, time;
  for (long v : cfg.get_ints("convergence.space_levels")) space.push_back(static_cast<int>(v));
  for (long v : cfg.get_ints("convergence.time_levels")) time.push_back(static_cast<int>(v));
  ConvergenceOptions c;
  c.solver = build_solver_config(cfg);
  const ConvergenceTable table = convergence_study(kind, space, time, c);

  CsvTable t;
  t.metadata = header_lines("convergence", cfg);
  t.metadata.push_back("geometry = " + to_string(kind));
  t.metadata.push_back(describe(c.solver));
  t.metadata.push_back("space spread = " + num(table.space_spread()));
  t.metadata.push_back("time spread = " + num(table.time_spread()));
  t.header = {"voxels_per_axis", "time_steps", "T12", "error"};
  for (std::size_t i = 0; i < table.space_levels.size(); ++i) {
    for (std::size_t j = 0; j < table.time_levels.size(); ++j) {
      t.rows.push_back({static_cast<double>(table.space_levels[i]),
                        static_cast<double>(table.time_levels[j]), table.T12[i][j],
                        table.error[i][j]});
    }
  }
  const fs::path out = prepare_out(o);
  const fs::path file = out / ("convergence_" + to_string(kind) + ".csv");
  write_csv(file, t);
  std::cout << "convergence: " << to_string(kind) << ", " << file.string() << "\n";
}

void cmd_gen_geom(const Options& o) {
  const ConfigMap cfg = user_config(o, "");
  const VoxelGrid grid = build_geometry(cfg, o.seed);
  VoxelEncoding enc;
  if (o.format == "ascii") {
    enc = VoxelEncoding::Ascii;
  } else if (o.format == "binary") {
    enc = VoxelEncoding::Binary;
  } else {
    throw ConfigError("--format must be ascii or binary");
  }
  const fs::path out = prepare_out(o);
  save_voxels(grid, out / o.geometry_file, enc);
  std::cout << describe(grid) << ", written to " << (out / o.geometry_file).string() << "\n";
}

int guarded(void (*command)(const Options&), const Options& o) {
  try {
    command(o);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Micropolar elastoplastic FFT solver"};
  app.require_subcommand(1);
  Options o;
  std::string config;
  std::string out;
  app.option_defaults()->always_capture_default();

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration file");
    sub->add_option("--out", out, "output directory (default .)");
    sub->add_option("--threads", o.threads, "worker threads (else POLARFFT_THREADS, else 1)");
    sub->add_option("--seed", o.seed, "seed for random geometries");
    sub->add_option("--snapshot-steps", o.snapshot_steps, "time nodes to write voxel snapshots for")
        ->default_str("")->delimiter(',');
    sub->add_option("--preset", o.preset, "named experiment preset");
  };

  struct Entry {
    CLI::App* app;
    void (*fn)(const Options&);
  };
  std::vector<Entry> entries;
  auto* run = app.add_subcommand("run", "time-stepped solve, writes report.csv");
  common(run);
  entries.push_back({run, cmd_run});

  auto* scan = app.add_subcommand("scan-lengths", "T32 and M11 over an (l_e, l_p) grid");
  common(scan);
  scan->add_option("--elastic-lengths", o.elastic_lengths)->default_str("")->delimiter(',');
  scan->add_option("--plastic-lengths", o.plastic_lengths)->default_str("")->delimiter(',');
  entries.push_back({scan, cmd_scan_lengths});

  auto* bench = app.add_subcommand("bench", "wall time against resolution");
  common(bench);
  bench->add_option("--sizes", o.sizes, "voxels per axis, e.g. 1,2,4,8")->default_str("")->delimiter(',');
  bench->add_option("--repeats", o.repeats);
  entries.push_back({bench, cmd_bench});

  auto* iters = app.add_subcommand("iterations", "iterations per step against hardening");
  common(iters);
  iters->add_option("--hardening", o.hardening)->default_str("")->delimiter(',');
  entries.push_back({iters, cmd_iterations});

  auto* mnms = app.add_subcommand("mnms-verify", "manufactured-solution closure");
  common(mnms);
  entries.push_back({mnms, cmd_mnms_verify});

  auto* conv = app.add_subcommand("convergence", "space/time calculation-verification table");
  common(conv);
  conv->add_option("--geometry", o.geometry, "laminate50 or centered_sphere_rL4");
  entries.push_back({conv, cmd_convergence});

  auto* gen = app.add_subcommand("gen-geom", "write the configured geometry as MPVX");
  common(gen);
  gen->add_option("--format", o.format, "ascii or binary");
  gen->add_option("--file", o.geometry_file, "file name inside --out");
  entries.push_back({gen, cmd_gen_geom});

  auto* list = app.add_subcommand("presets", "list experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (!config.empty()) o.config = config;
  if (!out.empty()) o.out = out;

  if (list->parsed()) {
    for (const auto& p : list_presets()) std::cout << p.name << "\t" << p.description << "\n";
    return kOk;
  }
  for (const auto& e : entries) {
    if (e.app->parsed()) return guarded(e.fn, o);
  }
  return kConfigError;
}

}  // namespace polarfft::cli
