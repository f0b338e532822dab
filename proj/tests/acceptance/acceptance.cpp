// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "polarfft/config.hpp"
#include "polarfft/errors.hpp"
#include "polarfft/experiments.hpp"
#include "polarfft/plasticity.hpp"
#include "polarfft/solver.hpp"
#include "polarfft/verification.hpp"
#include "sampling.hpp"

using namespace polarfft;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

RunConfig preset_run(const std::string& name, std::vector<std::pair<std::string, std::string>> keys = {}) {
  ConfigMap c;
  c.set("preset", name);
  for (const auto& [k, v] : keys) c.set(k, v);
  return build_run_config(c);
}

SolverResult run_preset(const RunConfig& rc, const StepObserver& observer = {}) {
  const Solver s(rc.grid, rc.materials, rc.solver);
  RunOptions opt;
  opt.observer = observer;
  return s.run(rc.loading, opt);
}

Outcome c1_mnms() {
  MnmsOptions o;
  o.steps = 100;
  o.dt = 0.01;
  o.solver = {1e-9, ErrorKind::Local, 10000};
  const MnmsReport r = mnms_run(mnms_geometry(), presets::appendix_d_codeverif(), o);
  return {r.max_error <= 1e-9 && static_cast<int>(r.steps.size()) == 100,
          "max |error| over e, g, t, m = " + num(r.max_error) + " (limit 1e-9)"};
}

Outcome c2_return_oracle() {
  std::mt19937_64 rng(2024);
  const int samples = 20000;
  double worst = 0.0;
  int plastic = 0;
  for (int i = 0; i < samples; ++i) {
    const auto c = testing::random_return_case(rng);
    const PointState a = radial_return(c.params, c.e_new, c.g_new, c.prev);
    const PointState b = implicit_eb_oracle(c.params, c.e_new, c.g_new, c.prev);
    worst = std::max(worst, testing::state_discrepancy(c.params, a, b, c.prev));
    if (a.p > c.prev.p || a.q > c.prev.q) ++plastic;
  }
  return {worst <= 1e-12, std::to_string(samples) + " states (" + std::to_string(plastic) +
                              " plastic), worst discrepancy " + num(worst) + " (limit 1e-12)"};
}

Outcome c3_kkt() {
  const std::vector<std::string> names{"fig1.circle", "fig1.circle.cauchy", "fig1.five",
                                       "fig1.five.cauchy", "fig1.ten", "fig1.ten.cauchy"};
  double worst_f = -1e300, worst_g = -1e300, worst_comp = 0.0, worst_branch = 0.0;
  long checked = 0;
  for (const auto& name : names) {
    const RunConfig rc = preset_run(name);
    auto observer = [&](const StepReport&, const FieldState& before, const FieldState& after) {
      for (std::size_t x = 0; x < after.points.size(); ++x) {
        const PhaseParams& ph = rc.materials[rc.grid.phase[x]];
        const PointState& s = after.points[x];
        const PointState& s0 = before.points[x];
        const double f = yield_f(ph, s.t, s.p);
        const double g = yield_g(ph, s.m, s.q);
        worst_f = std::max(worst_f, f / ph.t_yield);
        worst_g = std::max(worst_g, g / ph.m_yield);
        worst_comp = std::max({worst_comp, (s.p - s0.p) * std::abs(f), (s.q - s0.q) * std::abs(g)});
        if (s.p > s0.p) {
          worst_branch = std::max(
              worst_branch,
              std::abs(equivalent_stress(ph, s.t) - (ph.t_yield + ph.t_hardening * s.p)) / ph.t_yield);
        }
        if (s.q > s0.q) {
          worst_branch = std::max(
              worst_branch, std::abs(equivalent_couple_stress(ph, s.m) - (ph.m_yield + ph.m_hardening * s.q)) /
                                ph.m_yield);
        }
        ++checked;
      }
    };
    run_preset(rc, observer);
  }
  const bool pass = worst_f <= 1e-10 && worst_g <= 1e-10 && worst_comp <= 1e-10 && worst_branch <= 1e-10;
  return {pass, std::to_string(checked) + " voxel-steps: max f/t_Y " + num(worst_f) + ", max g/m_Y " +
                    num(worst_g) + ", max dp|f| " + num(worst_comp) + ", plastic-branch residual " +
                    num(worst_branch)};
}

Outcome c4_ratchet() {
  const RunConfig rc = preset_run("fig3.ratchet");
  const auto r = run_preset(rc).steps;
  double max_teq = 0.0;
  for (const auto& s : r) max_teq = std::max(max_teq, s.T_eq);
  const bool a = max_teq < 2.5;
  const auto peaks = cycle_peaks_m_eq(r, 10);
  const double my = rc.materials[0].m_yield;
  const double min_peak = *std::min_element(peaks.begin(), peaks.end());
  const bool b = peaks.size() == 10 && min_peak > my;
  const double area = loop_area(r, 0, 1);
  const double diss = total_dissipation(r);
  const bool c = area > 0.0 && std::abs(area - diss) <= 0.05 * diss;

  const RunConfig ec = preset_run("fig3.ratchet.elastic");
  const auto re = run_preset(ec).steps;
  double e_max = 0.0, t_max = 0.0;
  for (const auto& s : re) {
    e_max = std::max(e_max, std::abs(s.E(0, 1)));
    t_max = std::max(t_max, std::abs(s.T(0, 1)));
  }
  const double work_scale = e_max * t_max;
  const double elastic_area = loop_area(re, 0, 1);
  const bool d = std::abs(elastic_area) <= 1e-8 * work_scale;
  std::printf("  4a max T_eq = %s (< 2.5): %s\n", num(max_teq).c_str(), a ? "ok" : "fail");
  std::printf("  4b min per-cycle M_eq peak = %s (> m_Y = %s): %s\n", num(min_peak).c_str(),
              num(my).c_str(), b ? "ok" : "fail");
  std::printf("  4c loop area = %s, dissipation = %s, gap = %s (stored hardening energy "
              "not dissipated): %s\n",
              num(area).c_str(), num(diss).c_str(), num(area - diss).c_str(), c ? "ok" : "fail");
  std::printf("  4d elastic loop area = %s vs work scale %s: %s\n", num(elastic_area).c_str(),
              num(work_scale).c_str(), d ? "ok" : "fail");
  return {a && b && c && d, std::string("a ") + (a ? "ok" : "fail") + ", b " + (b ? "ok" : "fail") +
                                ", c " + (c ? "ok" : "fail") + ", d " + (d ? "ok" : "fail")};
}

Outcome c5_fatigue() {
  const auto plain = run_preset(preset_run("fatigue")).steps;
  double max_p = 0.0;
  bool q_monotone = true;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    max_p = std::max(max_p, plain[i].P);
    if (i && plain[i].Q < plain[i - 1].Q) q_monotone = false;
  }
  const bool q_grows = q_monotone && plain.back().Q > 0.0;
  const auto hard = run_preset(preset_run("fatigue.hardening")).steps;
  double max_p_h = 0.0;
  for (const auto& s : hard) max_p_h = std::max(max_p_h, s.P);
  const bool pass = max_p == 0.0 && q_grows && max_p_h > 0.0;
  return {pass, "m_H = 0: max P = " + num(max_p) + ", final Q = " + num(plain.back().Q) +
                    (q_monotone ? " (non-decreasing)" : " (decreases)") +
                    "; m_H = 0.0025: max P = " + num(max_p_h)};
}

Outcome c6_lengths() {
  const LengthScanOptions o = default_length_scan(16);
  const auto pts = scan_lengths(o);
  const std::size_t ne = o.elastic_lengths.size(), np = o.plastic_lengths.size();
  double m_min = 1e300, m_max = -1e300, m_sum = 0.0;
  for (const auto& p : pts) {
    m_min = std::min(m_min, p.M11);
    m_max = std::max(m_max, p.M11);
    m_sum += p.M11;
  }
  const double m_spread = (m_max - m_min) / std::abs(m_sum / pts.size());
  bool monotone = true;
  std::string ratios;
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 1; i < ne; ++i) {
      if (!(pts[i * np + j].T32 < pts[(i - 1) * np + j].T32)) monotone = false;
    }
    ratios += (j ? ", " : "") + num(pts[j].T32 / pts[(ne - 1) * np + j].T32);
  }
  // Ordering of the extreme readings, taken along the smallest plastic length
  // where the elastic length matters most.
  const double ratio = pts[0].T32 / pts[(ne - 1) * np].T32;
  const bool grid_ok = ne >= 4 && np >= 4;
  return {grid_ok && m_spread <= 0.01 && monotone && ratio > 3.0,
          std::to_string(ne) + "x" + std::to_string(np) + " grid at 16^3: M11 relative spread " +
              num(m_spread) + " (limit 0.01), T32 " + (monotone ? "monotone" : "not monotone") +
              " in l_e, T32(l_e min)/T32(l_e max) = " + num(ratio) + " at l_p = " +
              num(o.plastic_lengths.front()) + " (> 3; per l_p: " + ratios + ")"};
}

Outcome c7_complexity() {
  BenchOptions o;
  o.sizes = {4, 8, 16, 32};
  o.repeats = 3;
  const auto rows = bench(o);
  const std::vector<BenchRow> top(rows.end() - 3, rows.end());
  const double slope = nlogn_slope(top);
  std::string times;
  for (const auto& r : rows) times += " " + std::to_string(r.n) + "^3:" + num(r.mean_seconds) + "s";
  return {slope >= 0.8 && slope <= 1.2, "slope " + num(slope) + " in [0.8, 1.2];" + times};
}

Outcome c8_iterations() {
  IterationsOptions o;
  o.hardening = {0.0, 0.001, 0.01, 0.1};
  const auto curves = iterations_vs_hardening(o);
  bool ordered = true;
  std::string counts;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    counts += " x=" + num(curves[i].hardening) + ":" + std::to_string(curves[i].iterations.back());
    if (i && curves[i].iterations.back() > curves[i - 1].iterations.back()) ordered = false;
  }
  const bool strict = curves.front().iterations.back() > curves.back().iterations.back();
  return {ordered && strict, "final-step iterations" + counts + " (non-increasing in x, " +
                                 (strict ? "x=0 > x=0.1" : "x=0 not above x=0.1") + ")"};
}

Outcome c9_convergence() {
  const std::vector<int> space{4, 8, 16}, time{5, 10, 20, 40};
  const auto lam = convergence_study(ConvergenceGeometry::Laminate50, space, time);
  const auto sph = convergence_study(ConvergenceGeometry::CenteredSphere, space, time);
  const bool l_ok = lam.time_spread() >= 3.0 * lam.space_spread();
  const bool s_ok = sph.space_spread() >= 3.0 * sph.time_spread();
  return {l_ok && s_ok, "laminate space/time spread " + num(lam.space_spread()) + "/" +
                            num(lam.time_spread()) + "; sphere space/time spread " +
                            num(sph.space_spread()) + "/" + num(sph.time_spread())};
}

Outcome c10_dense() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  int cases = 0;
  for (const MaterialTable& mats : {presets::table4(), presets::table1(), presets::appendix_d_codeverif()}) {
    for (int rep = 0; rep < 4; ++rep) {
      VoxelGrid g({2, 2, 2}, {1.0, 1.0, 1.0}, 0);
      std::bernoulli_distribution coin(0.5);
      for (auto& ph : g.phase) ph = coin(rng) ? 1 : 0;
      g.phase[0] = 0;
      g.phase[7] = 1;
      const Tensor2 E = testing::random_tensor(rng, 1e-3), G = testing::random_tensor(rng, 1e-3);
      const auto dense = testing::dense_elastic_solve(g, mats, E, G);
      const Solver s(g, mats, {1e-14, ErrorKind::Local, 100000});
      RunOptions opt;
      opt.snapshot_nodes = {1};
      const auto r = s.run(LoadingPath::from_table({0.0, 1.0}, {Tensor2{}, E}, {Tensor2{}, G}), opt);
      for (std::size_t x = 0; x < g.voxels(); ++x) {
        const PointState& p = r.snapshots.at(0).points[x];
        if (p.p != 0.0 || p.q != 0.0) return {false, "loading left the elastic range"};
        for (int i = 0; i < 9; ++i) {
          worst = std::max({worst, std::abs(p.e.v[i] - dense.e[x].v[i]),
                            std::abs(p.g.v[i] - dense.g[x].v[i])});
        }
      }
      ++cases;
    }
  }
  return {worst <= 1e-8, std::to_string(cases) + " random 2x2x2 composites, max field difference " +
                             num(worst) + " (limit 1e-8)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 MNMS closure", c1_mnms},
      {"2 return-map oracle", c2_return_oracle},
      {"3 KKT consistency", c3_kkt},
      {"4 micro-ratcheting", c4_ratchet},
      {"5 fatigue plasticity onset", c5_fatigue},
      {"6 length-scale scan", c6_lengths},
      {"7 n log n scaling", c7_complexity},
      {"8 iterations vs hardening", c8_iterations},
      {"9 convergence-study shape", c9_convergence},
      {"10 dense elastic equivalence", c10_dense},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
