#include "polarfft/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polarfft/errors.hpp"
#include "polarfft/parallel.hpp"

namespace polarfft {

namespace {

bool is_zero(const Tensor2& t) { return t == Tensor2{}; }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

constexpr double kRoundoffWork = 1e-24;

struct FieldError {
  double sum_diff = 0.0;
  double max_diff = 0.0;
  double max_new = 0.0;
  double max_old = 0.0;
  Tensor2 mean;
};

double field_error(const FieldError& f, std::size_t n, ErrorKind kind) {
  const double diff = kind == ErrorKind::Average ? f.sum_diff / static_cast<double>(n) : f.max_diff;
  if (diff == 0.0) return 0.0;
  double denom = norm(f.mean * (1.0 / static_cast<double>(n)));
  if (!(denom > 1e-10 * f.max_new)) denom = f.max_new;
  if (denom == 0.0) denom = f.max_old;
  return diff / denom;
}

}  // namespace

void LoadingPath::validate() const {
  if (times.empty()) throw ConfigError("loading path has no time nodes");
  if (E.size() != times.size() || Gamma.size() != times.size()) {
    throw ConfigError("loading path: E and Gamma must have one entry per time node");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ConfigError("loading path: times must be strictly increasing (node " +
                        std::to_string(i) + ")");
    }
  }
  if (!is_zero(E[0]) || !is_zero(Gamma[0])) {
    throw ConfigError("loading path must start from the natural state E = Gamma = 0");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw ConfigError("loading path: non-finite time");
    for (int c = 0; c < 9; ++c) {
      if (!std::isfinite(E[i][c]) || !std::isfinite(Gamma[i][c])) {
        throw ConfigError("loading path: non-finite target at node " + std::to_string(i));
      }
    }
  }
}

LoadingPath LoadingPath::constant_rate(const Tensor2& E_rate, const Tensor2& Gamma_rate, double dt,
                                       int steps) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (steps < 0) throw ConfigError("number of steps must be non-negative");
  LoadingPath path;
  for (int n = 0; n <= steps; ++n) {
    const double t = n * dt;
    path.times.push_back(t);
    path.E.push_back(E_rate * t);
    path.Gamma.push_back(Gamma_rate * t);
  }
  return path;
}

LoadingPath LoadingPath::cyclic(const Tensor2& E_rate, const Tensor2& Gamma_rate, double dt,
                                double period, int cycles) {
  if (!(dt > 0.0) || !(period > 0.0)) throw ConfigError("time step and period must be positive");
  if (cycles < 0) throw ConfigError("number of cycles must be non-negative");
  const long half = std::lround(0.5 * period / dt);
  if (half < 1 || std::abs(half * dt - 0.5 * period) > 1e-9 * period) {
    throw ConfigError("half a cycle period (" + format_double(0.5 * period) +
                      ") must be a whole number of time steps (" + format_double(dt) + ")");
  }
  LoadingPath path;
  const long nodes = 2 * half * cycles + 1;
  for (long j = 0; j < nodes; ++j) {
    const long r = j % (2 * half);
    const double s = static_cast<double>(r <= half ? r : 2 * half - r) * dt;
    path.times.push_back(static_cast<double>(j) * dt);
    path.E.push_back(E_rate * s);
    path.Gamma.push_back(Gamma_rate * s);
  }
  return path;
}

LoadingPath LoadingPath::from_table(std::vector<double> times, std::vector<Tensor2> E,
                                    std::vector<Tensor2> Gamma) {
  LoadingPath path{std::move(times), std::move(E), std::move(Gamma)};
  path.validate();
  return path;
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("solver epsilon must be positive");
  if (max_iterations < 1) throw ConfigError("solver max_iterations must be >= 1");
}

Stiffness reference_medium(const VoxelGrid& grid, const MaterialTable& materials) {
  std::vector<std::size_t> counts(materials.size(), 0);
  for (auto id : grid.phase) {
    if (id >= materials.size()) {
      throw ConfigError("phase ID " + std::to_string(id) + " has no material entry");
    }
    ++counts[id];
  }
  Stiffness ref;
  const double total = static_cast<double>(grid.voxels());
  for (std::size_t id = 0; id < materials.size(); ++id) {
    if (counts[id] == 0) continue;
    const Stiffness s = assemble_stiffness(materials[id]);
    const double w = static_cast<double>(counts[id]) / total;
    ref.A += s.A * w;
    ref.B += s.B * w;
  }
  return ref;
}

void predictor(const FieldState& state, const LoadingPath& path, int node,
               std::vector<Tensor2>& e_guess, std::vector<Tensor2>& g_guess) {
  const std::size_t n = state.points.size();
  e_guess.resize(n);
  g_guess.resize(n);
  if (node <= 1 || state.e_before.size() != n) {
    std::fill(e_guess.begin(), e_guess.end(), path.E[node]);
    std::fill(g_guess.begin(), g_guess.end(), path.Gamma[node]);
    return;
  }
  const double ratio = (path.times[node] - path.times[node - 1]) /
                       (path.times[node - 1] - path.times[node - 2]);
  for (std::size_t x = 0; x < n; ++x) {
    const PointState& s = state.points[x];
    e_guess[x] = s.e + (s.e - state.e_before[x]) * ratio;
    g_guess[x] = s.g + (s.g - state.g_before[x]) * ratio;
  }
}

double error_metric(const std::vector<PointState>& previous, const std::vector<PointState>& next,
                    ErrorKind kind) {
  if (previous.size() != next.size()) throw ConfigError("error_metric: field sizes differ");
  if (next.empty()) return 0.0;
  std::array<FieldError, 4> f;
  for (std::size_t x = 0; x < next.size(); ++x) {
    const PointState& a = previous[x];
    const PointState& b = next[x];
    const std::array<std::pair<const Tensor2*, const Tensor2*>, 4> pairs{
        {{&a.e, &b.e}, {&a.t, &b.t}, {&a.g, &b.g}, {&a.m, &b.m}}};
    for (int k = 0; k < 4; ++k) {
      const double d = norm(*pairs[k].second - *pairs[k].first);
      f[k].sum_diff += d;
      f[k].max_diff = std::max(f[k].max_diff, d);
      f[k].max_new = std::max(f[k].max_new, norm(*pairs[k].second));
      f[k].max_old = std::max(f[k].max_old, norm(*pairs[k].first));
      f[k].mean += *pairs[k].second;
    }
  }
  // A conjugate pair (e, t) or (g, m) whose work scale is at round-off level
  // relative to the other pair is numerically zero.
  auto scale = [&](int a, int b) {
    return std::max(f[a].max_new, f[a].max_old) * std::max(f[b].max_new, f[b].max_old);
  };
  const double macro = scale(0, 1), micro = scale(2, 3);
  const bool skip_macro = macro <= kRoundoffWork * micro;
  const bool skip_micro = micro <= kRoundoffWork * macro;
  double err = 0.0;
  for (int k = 0; k < 4; ++k) {
    if ((k < 2 && skip_macro) || (k >= 2 && skip_micro)) continue;
    err = std::max(err, field_error(f[k], next.size(), kind));
  }
  return err;
}

Solver::Solver(VoxelGrid grid, MaterialTable materials, SolverConfig config)
    : grid_(std::move(grid)),
      materials_(std::move(materials)),
      config_(config),
      plan_(grid_.frequency_grid()) {
  config_.validate();
  materials_.validate(true);
  if (grid_.voxels() == 0) throw ConfigError("empty voxel grid");
  if (static_cast<std::size_t>(grid_.max_phase()) >= materials_.size()) {
    throw ConfigError("geometry uses phase ID " + std::to_string(grid_.max_phase()) +
                      " but the material table '" + materials_.name + "' has " +
                      std::to_string(materials_.size()) + " phases");
  }
  const Stiffness ref = reference_medium(grid_, materials_);
  cache_ = build_greens_cache(ref.A, ref.B, grid_.frequency_grid());
}

FieldState Solver::initial_state() const {
  FieldState s;
  s.node = 0;
  s.points.assign(grid_.voxels(), PointState{});
  return s;
}

void Solver::update_points(const FieldState& state, const std::vector<Tensor2>& e,
                           const std::vector<Tensor2>& g, std::vector<PointState>& out) const {
  const std::size_t n = grid_.voxels();
  out.resize(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      out[x] = radial_return_unchecked(materials_[grid_.phase[x]], e[x], g[x], state.points[x]);
    }
  });
}

void Solver::contract(const std::vector<PointState>& points, const Tensor2& E,
                      const Tensor2& Gamma, const std::vector<Tensor2>* tau_extra,
                      const std::vector<Tensor2>* mu_extra, std::vector<Tensor2>& e,
                      std::vector<Tensor2>& g) const {
  const std::size_t n = grid_.voxels();
  std::vector<Tensor2> tau(n), mu(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      tau[x] = points[x].t - polarfft::contract(cache_.A0, points[x].e);
      mu[x] = points[x].m - contract_couple(cache_.B0, points[x].g);
      if (tau_extra) tau[x] -= (*tau_extra)[x];
      if (mu_extra) mu[x] -= (*mu_extra)[x];
    }
  });
  std::vector<ComplexTensor2> tau_hat, mu_hat, e_hat, g_hat;
  plan_.forward(tau, tau_hat);
  plan_.forward(mu, mu_hat);
  apply_greens(cache_, tau_hat, mu_hat, e_hat, g_hat);
  plan_.inverse(e_hat, e);
  plan_.inverse(g_hat, g);
  for (std::size_t x = 0; x < n; ++x) {
    e[x] += E;
    g[x] += Gamma;
  }
}

StepReport Solver::summarize(const FieldState& before, const FieldState& after,
                             const LoadingPath& path, int iterations, double error) const {
  StepReport r;
  r.node = after.node;
  r.time = path.times[after.node];
  r.E = path.E[after.node];
  r.Gamma = path.Gamma[after.node];
  r.iterations = iterations;
  r.error = error;
  const double dt = path.times[after.node] - path.times[before.node];
  const std::size_t n = after.points.size();
  for (std::size_t x = 0; x < n; ++x) {
    const PhaseParams& p = materials_[grid_.phase[x]];
    const PointState& s = after.points[x];
    r.T += s.t;
    r.M += s.m;
    r.T_eq += equivalent_stress(p, s.t);
    r.M_eq += equivalent_couple_stress(p, s.m);
    r.P += s.p;
    r.Q += s.q;
    r.dissipation += dissipation_increment(p, before.points[x], s, dt) * dt;
  }
  const double inv = 1.0 / static_cast<double>(n);
  r.T *= inv;
  r.M *= inv;
  r.T_eq *= inv;
  r.M_eq *= inv;
  r.P *= inv;
  r.Q *= inv;
  r.dissipation *= inv;
  return r;
}

StepReport Solver::step(FieldState& state, const LoadingPath& path, int node,
                        const PolarizationSource& polarization) const {
  if (node != state.node + 1 || node > path.steps()) {
    throw ConfigError("step: node " + std::to_string(node) + " does not follow accepted node " +
                      std::to_string(state.node));
  }
  const Tensor2& E = path.E[node];
  const Tensor2& Gamma = path.Gamma[node];

  std::vector<Tensor2> e, g;
  predictor(state, path, node, e, g);
  std::vector<PointState> current, next;
  update_points(state, e, g, current);

  std::vector<Tensor2> tau_extra, mu_extra;
  if (polarization) {
    tau_extra.assign(grid_.voxels(), Tensor2{});
    mu_extra.assign(grid_.voxels(), Tensor2{});
    polarization(node, tau_extra, mu_extra);
  }
  const std::vector<Tensor2>* tp = polarization ? &tau_extra : nullptr;
  const std::vector<Tensor2>* mp = polarization ? &mu_extra : nullptr;

  int iterations = 0;
  double err = 0.0;
  while (true) {
    contract(current, E, Gamma, tp, mp, e, g);
    update_points(state, e, g, next);
    ++iterations;
    err = error_metric(current, next, config_.error_kind);
    current.swap(next);
    if (err <= config_.epsilon) break;
    if (iterations >= config_.max_iterations) {
      throw ConvergenceError("no convergence at node " + std::to_string(node) + " (t = " +
                             format_double(path.times[node]) + ") after " +
                             std::to_string(iterations) + " iterations, last error " +
                             format_double(err) + " > epsilon " + format_double(config_.epsilon) +
                             "; lower the phase contrast or raise epsilon");
    }
  }

  FieldState after;
  after.node = node;
  after.points = std::move(current);
  after.e_before.resize(state.points.size());
  after.g_before.resize(state.points.size());
  for (std::size_t x = 0; x < state.points.size(); ++x) {
    after.e_before[x] = state.points[x].e;
    after.g_before[x] = state.points[x].g;
  }
  StepReport report = summarize(state, after, path, iterations, err);
  state = std::move(after);
  return report;
}

SolverResult Solver::run(const LoadingPath& path, const RunOptions& options) const {
  path.validate();
  SolverResult result;
  FieldState state = initial_state();
  auto wants_snapshot = [&](int node) {
    return std::find(options.snapshot_nodes.begin(), options.snapshot_nodes.end(), node) !=
           options.snapshot_nodes.end();
  };
  if (wants_snapshot(0)) result.snapshots.push_back({0, path.times[0], state.points});
  for (int node = 1; node <= path.steps(); ++node) {
    FieldState before;
    if (options.observer) before = state;
    StepReport r = step(state, path, node, options.polarization);
    if (options.observer) options.observer(r, before, state);
    if (wants_snapshot(node)) result.snapshots.push_back({node, path.times[node], state.points});
    result.steps.push_back(r);
  }
  return result;
}

}  // namespace polarfft
