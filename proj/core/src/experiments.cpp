#include "polarfft/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "polarfft/errors.hpp"

namespace polarfft {

namespace {

struct PresetEntry {
  const char* name;
  const char* description;
  const char* text;
};

#define FIG1_SOLVER            \
  "[loading]\n"                \
  "kind = constant\n"          \
  "dt = 0.01\n"                \
  "steps = 100\n"              \
  "[solver]\n"                 \
  "epsilon = 1e-6\n"           \
  "error = local\n"            \
  "[output]\n"                 \
  "vtk_steps = 100\n"

#define MICROPOLAR_SHEAR                       \
  "[material]\npreset = table1\n"              \
  "[loading]\nE_rate.12 = 1\n"

#define CAUCHY_SHEAR                                 \
  "[material]\npreset = table1.cauchy\n"             \
  "[loading]\nE_rate.12 = 1\nE_rate.21 = 1\n"

#define CIRCLE_GEOMETRY                 \
  "[geometry]\n"                        \
  "kind = spheres\n"                    \
  "dims = 32 32 1\n"                    \
  "spheres = 0.35 0.4 0.5 0.2\n"

#define FIVE_GEOMETRY                                                                    \
  "[geometry]\n"                                                                         \
  "kind = spheres\n"                                                                     \
  "dims = 32 32 1\n"                                                                     \
  "spheres = 0.25 0.25 0.5 0.12; 0.72 0.3 0.5 0.08; 0.5 0.62 0.5 0.15; 0.2 0.8 0.5 0.06;" \
  " 0.82 0.78 0.5 0.1\n"

#define TEN_GEOMETRY            \
  "[geometry]\n"                \
  "kind = random_spheres\n"     \
  "dims = 32 32 1\n"            \
  "count = 10\n"                \
  "volume_fraction = 0.2\n"     \
  "seed = 1\n"                  \
  "planar = true\n"

#define SPINODAL_GEOMETRY \
  "[geometry]\n"          \
  "kind = file\n"

#define RATCHET_BASE          \
  "[geometry]\n"              \
  "kind = laminate\n"         \
  "dims = 4 4 4\n"            \
  "volume_fraction = 0.5\n"   \
  "axis = 2\n"                \
  "[loading]\n"               \
  "kind = cyclic\n"           \
  "E_rate.12 = 1\n"           \
  "dt = 0.01\n"               \
  "period = 1\n"              \
  "[solver]\n"                \
  "epsilon = 1e-5\n"          \
  "error = local\n"

#define LAMINATE_13_32(N)     \
  "[geometry]\n"              \
  "kind = laminate\n"         \
  "dims = " N "\n"            \
  "volume_fraction = 0.5\n"   \
  "axis = 2\n"                \
  "[loading]\n"               \
  "kind = constant\n"         \
  "E_rate.13 = 1\n"           \
  "Gamma_rate.32 = 1\n"       \
  "dt = 0.01\n"               \
  "steps = 100\n"

const PresetEntry kPresets[] = {
    {"fig1.circle", "off-centred circular inclusion, table1, micropolar shear E12",
     "provenance = plastic strain map: off-centred circle in a softer matrix, table1, 32x32x1, "
     "E12' = 1, 100 steps\n" CIRCLE_GEOMETRY MICROPOLAR_SHEAR FIG1_SOLVER},
    {"fig1.circle.cauchy", "off-centred circular inclusion, table1.cauchy, symmetric shear",
     "provenance = plastic strain map: off-centred circle, Cauchy-limit table1, 32x32x1, "
     "E12' = E21' = 1, 100 steps\n" CIRCLE_GEOMETRY CAUCHY_SHEAR FIG1_SOLVER},
    {"fig1.five", "five circles of different radii, table1, micropolar shear E12",
     "provenance = plastic strain map: five circles of varying radius, table1, 32x32x1, "
     "E12' = 1, 100 steps\n" FIVE_GEOMETRY MICROPOLAR_SHEAR FIG1_SOLVER},
    {"fig1.five.cauchy", "five circles of different radii, table1.cauchy",
     "provenance = plastic strain map: five circles, Cauchy-limit table1, 32x32x1, "
     "E12' = E21' = 1\n" FIVE_GEOMETRY CAUCHY_SHEAR FIG1_SOLVER},
    {"fig1.ten", "ten equal random circles (seeded), table1, micropolar shear E12",
     "provenance = plastic strain map: ten equal random circles at 20%, table1, 32x32x1, "
     "E12' = 1, 100 steps\n" TEN_GEOMETRY MICROPOLAR_SHEAR FIG1_SOLVER},
    {"fig1.ten.cauchy", "ten equal random circles (seeded), table1.cauchy",
     "provenance = plastic strain map: ten random circles, Cauchy-limit table1, 32x32x1, "
     "E12' = E21' = 1\n" TEN_GEOMETRY CAUCHY_SHEAR FIG1_SOLVER},
    {"fig1.spinodal", "spinodal image from geometry.path, table1, micropolar shear E12",
     "provenance = plastic strain map: external spinodal voxel image, table1, E12' = 1, "
     "100 steps\n" SPINODAL_GEOMETRY MICROPOLAR_SHEAR FIG1_SOLVER},
    {"fig1.spinodal.cauchy", "spinodal image from geometry.path, table1.cauchy",
     "provenance = plastic strain map: external spinodal voxel image, Cauchy-limit table1, "
     "E12' = E21' = 1\n" SPINODAL_GEOMETRY CAUCHY_SHEAR FIG1_SOLVER},
    {"fig3.ratchet", "micro-ratcheting: table2 laminate, 10 one-second shear cycles",
     "provenance = micro-plastic ratcheting: table2 50% laminate 4x4x4, 10 cycles 0 -> 0.5 -> 0 "
     "in E12, dt 0.01\n"
     "[material]\npreset = table2\n"
     "[loading]\ncycles = 10\n" RATCHET_BASE},
    {"fig3.ratchet.elastic", "all-elastic control of fig3.ratchet",
     "provenance = hysteresis control: table2 laminate with yield disabled, 10 cycles in E12\n"
     "[material]\npreset = table2.elastic\n"
     "[loading]\ncycles = 10\n" RATCHET_BASE},
    {"fatigue", "fatigue without micro hardening: t_Y = 1.9, m_H = 0, 50 cycles",
     "provenance = macro-plasticity onset: table2 laminate with t_Y = 1.9 and m_H = 0, "
     "50 cycles in E12\n"
     "[material]\npreset = table2.fatigue(1.9,0)\n"
     "[loading]\ncycles = 50\n" RATCHET_BASE},
    {"fatigue.hardening", "fatigue with micro hardening: t_Y = 1.9, m_H = 0.0025, 50 cycles",
     "provenance = macro-plasticity onset: table2 laminate with t_Y = 1.9 and m_H = 0.0025, "
     "50 cycles in E12\n"
     "[material]\npreset = table2.fatigue(1.9,0.0025)\n"
     "[loading]\ncycles = 50\n" RATCHET_BASE},
    {"lengths", "length-scale scan: four spheres at 20%, table3 grid over (l_e, l_p)",
     "provenance = length-scale heatmaps: table3 construction, four spheres at 20% in 16^3, "
     "E32' = 1 and Gamma11' = 1, 100 steps\n"
     "[geometry]\nkind = four_spheres\ndims = 16 16 16\nvolume_fraction = 0.2\n"
     "[loading]\nkind = constant\nE_rate.32 = 1\nGamma_rate.11 = 1\ndt = 0.01\nsteps = 100\n"
     "[solver]\nepsilon = 1e-5\nerror = local\n"
     "[scan]\nelastic_lengths = 0.1 0.25 0.5 1.0\nplastic_lengths = 0.1 0.25 0.5 1.0\n"},
    {"iterations", "iterations against hardening contrast on an 8^3 laminate",
     "provenance = iterations vs hardening: table5 contrasts (beta of phase 0 set to gamma/2), "
     "8^3 laminate, E13' = 1 and Gamma32' = 1\n"
     "[material]\npreset = table5.admissible(0)\n" LAMINATE_13_32("8 8 8")
     "[solver]\nepsilon = 1e-8\nerror = local\nmax_iterations = 100000\n"
     "[iterations]\nhardening = 0 0.001 0.005 0.01 0.05 0.1\n"},
    {"bench", "timing study: table4 50% laminate at n^3 voxels",
     "provenance = calculation time: table4 50% laminate, E13' = 1 and Gamma32' = 1, 100 steps\n"
     "[material]\npreset = table4\n" LAMINATE_13_32("8 8 8")
     "[solver]\nepsilon = 1e-5\nerror = local\n"
     "[bench]\nsizes = 1 2 4 8 16 32\nrepeats = 10\n"},
    {"mnms", "manufactured-solution closure on the 4^3 centred cube",
     "provenance = code verification: numerically manufactured solution, appendixD.codeverif, "
     "4^3 with centred 2^3 cube, 100 steps, epsilon 1e-9\n"
     "[geometry]\nkind = cube\ndims = 4 4 4\ninner = 2 2 2\ninner_phase = 0\nouter_phase = 1\n"
     "[material]\npreset = appendixD.codeverif\n"
     "[loading]\nkind = constant\ndt = 0.01\nsteps = 100\n"
     "[solver]\nepsilon = 1e-9\nerror = local\n"},
    {"convergence", "calculation-verification table over space and time levels",
     "provenance = calculation verification: appendixD.convergence, E12' = 1 on [0, 1], "
     "average metric at 1e-4\n"
     "[geometry]\nkind = laminate\ndims = 4 4 4\nvolume_fraction = 0.5\naxis = 2\n"
     "[material]\npreset = appendixD.convergence\n"
     "[loading]\nkind = constant\nE_rate.12 = 1\ndt = 0.01\nsteps = 100\n"
     "[solver]\nepsilon = 1e-4\nerror = average\n"
     "[convergence]\ngeometry = laminate50\nspace_levels = 2 4 8 16\n"
     "time_levels = 5 10 20 40\n"},
};

#undef FIG1_SOLVER
#undef MICROPOLAR_SHEAR
#undef CAUCHY_SHEAR
#undef CIRCLE_GEOMETRY
#undef FIVE_GEOMETRY
#undef TEN_GEOMETRY
#undef SPINODAL_GEOMETRY
#undef RATCHET_BASE
#undef LAMINATE_13_32

Tensor2 unit_rate(int k, int l) {
  Tensor2 t;
  t(k, l) = 1.0;
  return t;
}

std::size_t working_bytes(const Solver& s) {
  const std::size_t n = s.grid().voxels();
  const GreensCache& c = s.cache();
  const std::size_t spectral = c.grid.spectral_size();
  return n * (4 * sizeof(PointState) + 6 * sizeof(Tensor2)) +
         spectral * (2 * sizeof(ComplexTensor2) + sizeof(std::size_t)) +
         (c.inverse.size() + c.dual_inverse.size()) * sizeof(ComplexMat6);
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& p : kPresets) out.push_back({p.name, p.description});
  return out;
}

ConfigMap preset_config(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) {
      ConfigMap cfg = ConfigMap::parse(p.text, "preset " + name);
      cfg.set("name", name);
      return cfg;
    }
  }
  std::string known;
  for (const auto& p : kPresets) known += std::string(known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

ConfigMap resolve_preset(const ConfigMap& cfg) {
  if (!cfg.has("preset")) return cfg;
  ConfigMap base = preset_config(cfg.get_string("preset"));
  base.base_dir = cfg.base_dir;
  base.merge(cfg);
  return base;
}

double loop_area(const std::vector<StepReport>& steps, int k, int l) {
  double area = 0.0;
  double e_prev = 0.0, t_prev = 0.0;
  for (const auto& s : steps) {
    const double e = s.E(k, l), t = s.T(k, l);
    area += 0.5 * (t + t_prev) * (e - e_prev);
    e_prev = e;
    t_prev = t;
  }
  // close the curve back to the natural state
  area += 0.5 * t_prev * (0.0 - e_prev);
  return area;
}

double total_dissipation(const std::vector<StepReport>& steps) {
  double d = 0.0;
  for (const auto& s : steps) d += s.dissipation;
  return d;
}

std::optional<int> yield_onset(const std::vector<StepReport>& steps, int k, int l,
                               double relative) {
  if (steps.empty() || steps.front().E(k, l) == 0.0) return std::nullopt;
  const double slope = steps.front().T_eq / steps.front().E(k, l);
  for (const auto& s : steps) {
    const double linear = slope * s.E(k, l);
    if (std::abs(s.T_eq - linear) > relative * std::abs(linear)) return s.node;
  }
  return std::nullopt;
}

std::vector<double> cycle_peaks_m_eq(const std::vector<StepReport>& steps, int cycles) {
  if (cycles <= 0 || steps.size() % static_cast<std::size_t>(cycles) != 0) {
    throw ConfigError("step count is not a whole number of cycles");
  }
  const std::size_t per = steps.size() / static_cast<std::size_t>(cycles);
  std::vector<double> out(static_cast<std::size_t>(cycles), 0.0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out[i / per] = std::max(out[i / per], steps[i].M_eq);
  }
  return out;
}

LengthScanOptions default_length_scan(int n) {
  LengthScanOptions o;
  o.grid = gen_spheres({n, n, n}, four_spheres(0.2), {1.0, 1.0, 1.0});
  o.elastic_lengths = {0.1, 0.25, 0.5, 1.0};
  o.plastic_lengths = {0.1, 0.25, 0.5, 1.0};
  o.loading = LoadingPath::constant_rate(unit_rate(2, 1), unit_rate(0, 0), 0.01, 100);
  o.solver = {1e-5, ErrorKind::Local, 10000};
  return o;
}

std::vector<LengthScanPoint> scan_lengths(const LengthScanOptions& options) {
  if (options.elastic_lengths.empty() || options.plastic_lengths.empty()) {
    throw ConfigError("length scan needs at least one elastic and one plastic length");
  }
  const double L = *std::min_element(options.grid.lengths.begin(), options.grid.lengths.end());
  for (const auto* list : {&options.elastic_lengths, &options.plastic_lengths}) {
    for (double v : *list) {
      if (!(v > 0.0 && v <= L)) {
        throw ConfigError("length scale " + std::to_string(v) + " outside (0, L] with L = " +
                          std::to_string(L));
      }
    }
  }
  std::vector<LengthScanPoint> out;
  for (double le : options.elastic_lengths) {
    for (double lp : options.plastic_lengths) {
      const Solver solver(options.grid, presets::table3(le, lp), options.solver);
      const SolverResult r = solver.run(options.loading);
      LengthScanPoint p{le, lp, 0.0, 0.0, 0};
      for (const auto& s : r.steps) p.iterations += s.iterations;
      if (!r.steps.empty()) {
        p.T32 = r.steps.back().T(2, 1);
        p.M11 = r.steps.back().M(0, 0);
      }
      out.push_back(p);
    }
  }
  return out;
}

std::vector<BenchRow> bench(const BenchOptions& options) {
  if (options.repeats < 1) throw ConfigError("bench repeats must be >= 1");
  const LoadingPath path =
      LoadingPath::constant_rate(unit_rate(0, 2), unit_rate(2, 1), options.dt, options.steps);
  const MaterialTable mats = presets::table4();
  std::vector<BenchRow> rows;
  for (int n : options.sizes) {
    if (n < 1) throw ConfigError("bench sizes must be >= 1");
    const VoxelGrid grid = gen_laminate({n, n, n}, 0.5, kStudyLaminateNormal, {1.0, 1.0, 1.0}).grid;
    BenchRow row;
    row.n = n;
    row.voxels = grid.voxels();
    row.repeats = options.repeats;
    row.power_of_two = (n & (n - 1)) == 0;
    double total = 0.0;
    row.min_seconds = INFINITY;
    for (int rep = 0; rep < options.repeats; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const Solver solver(grid, mats, options.solver);
      const SolverResult r = solver.run(path);
      const auto t1 = std::chrono::steady_clock::now();
      const double sec = std::chrono::duration<double>(t1 - t0).count();
      total += sec;
      row.min_seconds = std::min(row.min_seconds, sec);
      if (rep == 0) {
        row.working_bytes = working_bytes(solver);
        for (const auto& s : r.steps) row.iterations += s.iterations;
      }
    }
    row.mean_seconds = total / options.repeats;
    rows.push_back(row);
  }
  return rows;
}

double nlogn_slope(const std::vector<BenchRow>& rows) {
  if (rows.size() < 2) throw ConfigError("slope needs at least two resolutions");
  std::vector<double> x, y;
  for (const auto& r : rows) {
    const double n = static_cast<double>(r.voxels);
    x.push_back(std::log(std::max(n, n * std::log2(n))));
    y.push_back(std::log(r.mean_seconds));
  }
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<IterationsCurve> iterations_vs_hardening(const IterationsOptions& options) {
  const VoxelGrid grid = gen_laminate({options.n, options.n, options.n}, 0.5, kStudyLaminateNormal).grid;
  const LoadingPath path =
      LoadingPath::constant_rate(unit_rate(0, 2), unit_rate(2, 1), options.dt, options.steps);
  std::vector<IterationsCurve> out;
  for (double x : options.hardening) {
    const Solver solver(grid, presets::table5_admissible(x), options.solver);
    const SolverResult r = solver.run(path);
    IterationsCurve c;
    c.hardening = x;
    for (const auto& s : r.steps) {
      c.iterations.push_back(s.iterations);
      c.P.push_back(s.P);
      c.Q.push_back(s.Q);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace polarfft
