#include "polarfft/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polarfft/errors.hpp"
#include "polarfft/parallel.hpp"

namespace polarfft {

namespace {

constexpr int kDim = 38;  // e, g, t, m, p, q
using State = std::array<double, kDim>;

PointState unpack(const State& y) {
  PointState s;
  for (int i = 0; i < 9; ++i) {
    s.e[i] = y[i];
    s.g[i] = y[9 + i];
    s.t[i] = y[18 + i];
    s.m[i] = y[27 + i];
  }
  s.p = y[36];
  s.q = y[37];
  return s;
}

Tensor2 slice(const State& y, int offset) {
  Tensor2 t;
  for (int i = 0; i < 9; ++i) t[i] = y[offset + i];
  return t;
}

struct TangentRhs {
  const PhaseParams& p;
  Stiffness C;
  const RateFunction& rates;

  // Plastic multiplier numerators n:A:e' and n~:B:g'.
  double macro_loading(const Tensor2& t, const Tensor2& e_rate) const {
    return double_contract(macro_flow_direction(p, t), C.A, e_rate);
  }
  double micro_loading(const Tensor2& m, const Tensor2& g_rate) const {
    return double_contract(transpose(micro_flow_direction(p, m)), C.B, g_rate);
  }

  State operator()(double time, const State& y, bool macro_active, bool micro_active) const {
    Tensor2 e_rate, g_rate;
    rates(time, e_rate, g_rate);
    State dy{};
    const Tensor2 t = slice(y, 18);
    const Tensor2 m = slice(y, 27);

    Tensor2 e_plastic_rate;
    double p_rate = 0.0;
    if (macro_active) {
      const Tensor2 n = macro_flow_direction(p, t);
      const double denom = double_contract(n, C.A, n) + p.t_hardening;
      p_rate = std::max(double_contract(n, C.A, e_rate), 0.0) / denom;
      e_plastic_rate = n * p_rate;
    }
    Tensor2 g_plastic_rate;
    double q_rate = 0.0;
    if (micro_active) {
      const Tensor2 nt = transpose(micro_flow_direction(p, m));
      const double denom = double_contract(nt, C.B, nt) + p.m_hardening;
      q_rate = std::max(double_contract(nt, C.B, g_rate), 0.0) / denom;
      g_plastic_rate = nt * q_rate;
    }
    const Tensor2 t_rate = polarfft::contract(C.A, e_rate - e_plastic_rate);
    const Tensor2 m_rate = contract_couple(C.B, g_rate - g_plastic_rate);
    for (int i = 0; i < 9; ++i) {
      dy[i] = e_rate[i];
      dy[9 + i] = g_rate[i];
      dy[18 + i] = t_rate[i];
      dy[27 + i] = m_rate[i];
    }
    dy[36] = p_rate;
    dy[37] = q_rate;
    return dy;
  }
};

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double d1 = 71.0 / 57600, d3 = -71.0 / 16695, d4 = 71.0 / 1920, d5 = -17253.0 / 339200,
                 d6 = 22.0 / 525, d7 = -1.0 / 40;

struct StepResult {
  State y;
  double error;  // scaled, accept when <= 1
};

StepResult dopri_step(const TangentRhs& f, double t0, const State& y0, double h, bool ma, bool mi,
                      const OdeOptions& o) {
  auto axpy = [](const State& y, std::initializer_list<std::pair<double, const State*>> terms,
                 double h) {
    State out = y;
    for (const auto& [c, k] : terms)
      for (int i = 0; i < kDim; ++i) out[i] += h * c * (*k)[i];
    return out;
  };
  const State k1 = f(t0, y0, ma, mi);
  const State k2 = f(t0 + c2 * h, axpy(y0, {{a21, &k1}}, h), ma, mi);
  const State k3 = f(t0 + c3 * h, axpy(y0, {{a31, &k1}, {a32, &k2}}, h), ma, mi);
  const State k4 = f(t0 + c4 * h, axpy(y0, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h), ma, mi);
  const State k5 =
      f(t0 + c5 * h, axpy(y0, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h), ma, mi);
  const State k6 = f(t0 + h,
                     axpy(y0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h),
                     ma, mi);
  const State y1 = axpy(y0, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
  const State k7 = f(t0 + h, y1, ma, mi);
  double err = 0.0;
  for (int i = 0; i < kDim; ++i) {
    const double ei =
        h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    err = std::max(err, std::abs(ei) / sc);
  }
  return {y1, err};
}

}  // namespace

Tensor2 manufactured_mean_strain_rate() {
  Tensor2 t;
  for (int i = 0; i < 9; ++i) t[i] = 1.0 + i;
  return t;
}

Tensor2 manufactured_mean_curvature_rate() {
  Tensor2 t;
  for (int i = 0; i < 9; ++i) t[i] = 1.5 + i;
  return t;
}

ManufacturedStrains manufactured_strains(const Vec3& x, double t, Vec3 lengths, double scale) {
  const double tau = 2.0 * std::numbers::pi;
  std::array<double, 3> s{}, c{}, w{};
  for (int d = 0; d < 3; ++d) {
    w[d] = tau / lengths[d];
    s[d] = std::sin(w[d] * x[d]);
    c[d] = std::cos(w[d] * x[d]);
  }
  const double S = s[0] * s[1] * s[2];
  const Vec3 grad{w[0] * c[0] * s[1] * s[2], w[1] * s[0] * c[1] * s[2], w[2] * s[0] * s[1] * c[2]};

  ManufacturedStrains out;
  const Tensor2 E_rate = manufactured_mean_strain_rate();
  const Tensor2 G_rate = manufactured_mean_curvature_rate();
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      double eps_sum = 0.0;
      for (int m = 0; m < 3; ++m) eps_sum += levi_civita(l, k, m);
      out.e_rate(k, l) = scale * (E_rate(k, l) + grad[k] + eps_sum * S);
      out.g_rate(k, l) = scale * (G_rate(k, l) + grad[l]);
    }
  }
  out.e = out.e_rate * t;
  out.g = out.g_rate * t;
  return out;
}

PointTrajectory integrate_point_tangent(const PhaseParams& params, const RateFunction& rates,
                                        const std::vector<double>& times,
                                        const OdeOptions& options) {
  if (times.empty()) return {};
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("integration times must increase");
  }
  const TangentRhs rhs{params, assemble_stiffness(params), rates};

  PointTrajectory out;
  out.times = times;
  State y{};
  double t = times.front();
  out.states.push_back(unpack(y));
  bool macro_active = false;
  bool micro_active = false;
  double h = options.initial_step;
  int taken = 0;

  auto f_of = [&](const State& s) { return yield_f(params, slice(s, 18), s[36]); };
  auto g_of = [&](const State& s) { return yield_g(params, slice(s, 27), s[37]); };
  auto fail = [&](const std::string& why) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    return ConvergenceError("point integrator failed at t = " + std::string(buf) + ": " + why);
  };

  for (std::size_t node = 1; node < times.size(); ++node) {
    const double t_end = times[node];
    while (t < t_end) {
      if (++taken > options.max_steps) throw fail("step budget exhausted");
      const bool last = t + h >= t_end;
      const double step = last ? t_end - t : h;
      const StepResult r = dopri_step(rhs, t, y, step, macro_active, micro_active, options);
      if (!(r.error <= 1.0)) {
        h = step * std::max(0.1, 0.9 * std::pow(r.error, -0.2));
        if (!std::isfinite(h) || h < options.min_step) throw fail("step size underflow");
        continue;
      }
      const bool macro_event = !macro_active && f_of(r.y) > 0.0;
      const bool micro_event = !micro_active && g_of(r.y) > 0.0;
      if (macro_event || micro_event) {
        // Largest sub-step that stays inside the elastic domain of every
        // branch that would otherwise overshoot.
        double lo = 0.0;
        double hi = step;
        State y_lo = y;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(t)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const State ym = dopri_step(rhs, t, y, mid, macro_active, micro_active, options).y;
          const bool over = (macro_event && f_of(ym) > 0.0) || (micro_event && g_of(ym) > 0.0);
          if (over) {
            hi = mid;
          } else {
            lo = mid;
            y_lo = ym;
          }
        }
        // Advance to the onset and switch on whichever branch reached it.
        const State y_hi = dopri_step(rhs, t, y, hi, macro_active, micro_active, options).y;
        t += lo;
        y = y_lo;
        if (macro_event && f_of(y_hi) > 0.0) macro_active = true;
        if (micro_event && g_of(y_hi) > 0.0) micro_active = true;
        if (t_end - t <= 1e-15 * std::max(1.0, std::abs(t_end))) t = t_end;
        continue;
      }
      t = last ? t_end : t + step;
      y = r.y;
      // Elastic unloading switches a branch off.
      Tensor2 e_rate, g_rate;
      rates(t, e_rate, g_rate);
      if (macro_active && rhs.macro_loading(slice(y, 18), e_rate) < 0.0) macro_active = false;
      if (micro_active && rhs.micro_loading(slice(y, 27), g_rate) < 0.0) micro_active = false;
      const double grow = r.error > 0.0 ? 0.9 * std::pow(r.error, -0.2) : 5.0;
      h = step * std::clamp(grow, 0.2, 5.0);
      if (last) h = std::max(h, options.initial_step);
    }
    out.states.push_back(unpack(y));
  }
  return out;
}

VoxelGrid mnms_geometry() { return gen_centered_cube({4, 4, 4}, {2, 2, 2}, {1.0, 1.0, 1.0}, 0, 1); }

MnmsReport mnms_run(const VoxelGrid& grid, const MaterialTable& materials,
                    const MnmsOptions& options) {
  const Tensor2 E_rate = manufactured_mean_strain_rate() * options.scale;
  const Tensor2 G_rate = manufactured_mean_curvature_rate() * options.scale;
  const LoadingPath path = LoadingPath::constant_rate(E_rate, G_rate, options.dt, options.steps);

  Solver solver(grid, materials, options.solver);
  const std::size_t n = grid.voxels();
  std::vector<Vec3> centers(n);
  for (int k = 0; k < grid.dims[2]; ++k)
    for (int j = 0; j < grid.dims[1]; ++j)
      for (int i = 0; i < grid.dims[0]; ++i) centers[grid.index(i, j, k)] = grid.voxel_center(i, j, k);

  std::vector<PointTrajectory> manufactured(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const ManufacturedStrains ms = manufactured_strains(centers[x], 1.0, grid.lengths, options.scale);
      RateFunction rates = [&ms](double, Tensor2& er, Tensor2& gr) {
        er = ms.e_rate;
        gr = ms.g_rate;
      };
      manufactured[x] =
          integrate_point_tangent(materials[grid.phase[x]], rates, path.times, options.ode);
    }
  });

  MnmsReport report;
  report.voxel_max.assign(n, {0.0, 0.0, 0.0, 0.0});
  RunOptions run;
  run.polarization = [&](int node, std::vector<Tensor2>& tau, std::vector<Tensor2>& mu) {
    for (std::size_t x = 0; x < n; ++x) {
      tau[x] = manufactured[x].states[node].t;
      mu[x] = manufactured[x].states[node].m;
    }
  };
  run.observer = [&](const StepReport& r, const FieldState&, const FieldState& after) {
    MnmsStepError se;
    se.node = r.node;
    se.time = r.time;
    se.iterations = r.iterations;
    for (std::size_t x = 0; x < n; ++x) {
      const ManufacturedStrains ms =
          manufactured_strains(centers[x], r.time, grid.lengths, options.scale);
      const PointState& ref = manufactured[x].states[r.node];
      const PointState& got = after.points[x];
      const std::array<std::pair<Tensor2, Tensor2>, 4> pairs{
          {{got.e, ms.e}, {got.g, ms.g}, {got.t, ref.t}, {got.m, ref.m}}};
      for (int f = 0; f < 4; ++f) {
        double worst = 0.0;
        for (int c = 0; c < 9; ++c)
          worst = std::max(worst, std::abs(pairs[f].first[c] - pairs[f].second[c]));
        se.max_error[f] = std::max(se.max_error[f], worst);
        report.voxel_max[x][f] = std::max(report.voxel_max[x][f], worst);
      }
    }
    for (double v : se.max_error) report.max_error = std::max(report.max_error, v);
    report.steps.push_back(se);
  };
  solver.run(path, run);
  return report;
}

ConvergenceGeometry parse_convergence_geometry(const std::string& name) {
  if (name == "laminate50" || name == "laminate") return ConvergenceGeometry::Laminate50;
  if (name == "centered_sphere_rL4" || name == "sphere") return ConvergenceGeometry::CenteredSphere;
  throw ConfigError("unknown convergence geometry '" + name +
                    "' (expected laminate50 or centered_sphere_rL4)");
}

std::string to_string(ConvergenceGeometry g) {
  return g == ConvergenceGeometry::Laminate50 ? "laminate50" : "centered_sphere_rL4";
}

VoxelGrid convergence_geometry(ConvergenceGeometry kind, int n) {
  if (kind == ConvergenceGeometry::Laminate50) return gen_laminate({n, n, n}, 0.5, kStudyLaminateNormal).grid;
  return gen_spheres({n, n, n}, {{{0.5, 0.5, 0.5}, 0.25}}, {1.0, 1.0, 1.0}, 0, 1);
}

double ConvergenceTable::space_spread() const {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t s = 0; s < error.size(); ++s) {
    lo = std::min(lo, error[s].back());
    hi = std::max(hi, error[s].back());
  }
  return hi - lo;
}

double ConvergenceTable::time_spread() const {
  const auto& row = error.back();
  return *std::max_element(row.begin(), row.end()) - *std::min_element(row.begin(), row.end());
}

ConvergenceTable convergence_study(ConvergenceGeometry kind, std::vector<int> space_levels,
                                   std::vector<int> time_levels,
                                   const ConvergenceOptions& options) {
  if (space_levels.empty() || time_levels.empty()) {
    throw ConfigError("convergence study needs at least one space and one time level");
  }
  std::sort(space_levels.begin(), space_levels.end());
  std::sort(time_levels.begin(), time_levels.end());
  ConvergenceTable table;
  table.geometry = kind;
  table.space_levels = space_levels;
  table.time_levels = time_levels;
  const MaterialTable materials = presets::appendix_d_convergence();
  Tensor2 rate;
  rate(0, 1) = 1.0;
  for (int n : space_levels) {
    if (n < 1) throw ConfigError("space levels must be positive");
    Solver solver(convergence_geometry(kind, n), materials, options.solver);
    std::vector<double> row;
    for (int steps : time_levels) {
      if (steps < 1) throw ConfigError("time levels must be positive");
      const LoadingPath path =
          LoadingPath::constant_rate(rate, Tensor2{}, options.final_time / steps, steps);
      const SolverResult res = solver.run(path);
      row.push_back(res.steps.back().T(0, 1));
    }
    table.T12.push_back(row);
  }
  const double ref = table.T12.back().back();
  for (const auto& row : table.T12) {
    std::vector<double> err;
    for (double v : row) err.push_back(std::abs(v - ref));
    table.error.push_back(err);
  }
  return table;
}

}  // namespace polarfft
