#include <gtest/gtest.h>

#include <cmath>

#include "polarfft/errors.hpp"
#include "polarfft/experiments.hpp"

using namespace polarfft;

namespace {

StepReport point(double E12, double T12) {
  StepReport s;
  s.E(0, 1) = E12;
  s.T(0, 1) = T12;
  return s;
}

RunConfig preset(const std::string& name) {
  ConfigMap c;
  c.set("preset", name);
  return build_run_config(c);
}

}  // namespace

TEST(Experiments, LoopAreaOfKnownPaths) {
  // Out along T = 2E, back along T = 0: area 1/2 * 1 * 2 = 1.
  const std::vector<StepReport> tri{point(0.5, 1.0), point(1.0, 2.0), point(1.0, 0.0),
                                    point(0.5, 0.0)};
  EXPECT_NEAR(loop_area(tri, 0, 1), 1.0, 1e-14);
  // Elastic out and back encloses nothing.
  const std::vector<StepReport> line{point(0.5, 1.0), point(1.0, 2.0), point(0.5, 1.0),
                                     point(0.0, 0.0)};
  EXPECT_NEAR(loop_area(line, 0, 1), 0.0, 1e-14);
  EXPECT_EQ(loop_area({}, 0, 1), 0.0);
}

TEST(Experiments, DissipationSumAndCyclePeaks) {
  std::vector<StepReport> s(6);
  for (int i = 0; i < 6; ++i) {
    s[i].dissipation = 0.5 * i;
    s[i].M_eq = (i % 3) + 0.1 * i;
  }
  EXPECT_DOUBLE_EQ(total_dissipation(s), 7.5);
  const auto peaks = cycle_peaks_m_eq(s, 2);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_DOUBLE_EQ(peaks[0], 2.2);
  EXPECT_DOUBLE_EQ(peaks[1], 2.5);
}

TEST(Experiments, YieldOnsetDetection) {
  std::vector<StepReport> s;
  for (int i = 1; i <= 10; ++i) {
    StepReport r;
    r.node = i;
    r.E(0, 1) = 0.1 * i;
    r.T_eq = i <= 4 ? 0.2 * i : 0.8 + 0.05 * (i - 4);
    s.push_back(r);
  }
  const auto n = yield_onset(s, 0, 1);
  ASSERT_TRUE(n.has_value());
  EXPECT_EQ(*n, 5);
  s.resize(4);
  EXPECT_FALSE(yield_onset(s, 0, 1).has_value());
}

TEST(Experiments, NlognSlopeOfSyntheticTimes) {
  std::vector<BenchRow> rows;
  for (int n : {8, 16, 32}) {
    BenchRow r;
    r.n = n;
    r.voxels = static_cast<std::size_t>(n) * n * n;
    r.mean_seconds = 1e-6 * r.voxels * std::log2(double(r.voxels));
    rows.push_back(r);
  }
  EXPECT_NEAR(nlogn_slope(rows), 1.0, 1e-12);
  for (auto& r : rows) r.mean_seconds = 1e-9 * double(r.voxels) * double(r.voxels);
  EXPECT_GT(nlogn_slope(rows), 1.5);
}

TEST(Experiments, SmallLengthScan) {
  LengthScanOptions o = default_length_scan(4);
  o.elastic_lengths = {0.25, 1.0};
  o.plastic_lengths = {0.5};
  o.loading = LoadingPath::constant_rate(o.loading.E[1] * 100.0, o.loading.Gamma[1] * 100.0,
                                         0.01, 10);
  const auto pts = scan_lengths(o);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].elastic_length, 0.25);
  EXPECT_GT(pts[0].T32, pts[1].T32);
  o.elastic_lengths = {2.0};
  EXPECT_THROW(scan_lengths(o), ConfigError);
  o.elastic_lengths = {0.0};
  EXPECT_THROW(scan_lengths(o), ConfigError);
}

TEST(Experiments, BenchSmoke) {
  BenchOptions o;
  o.sizes = {2, 3};
  o.repeats = 1;
  o.steps = 5;
  const auto rows = bench(o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].voxels, 8u);
  EXPECT_TRUE(rows[0].power_of_two);
  EXPECT_FALSE(rows[1].power_of_two);
  EXPECT_GT(rows[0].mean_seconds, 0.0);
  EXPECT_GT(rows[1].working_bytes, rows[0].working_bytes);
}

TEST(Experiments, IterationsSmoke) {
  IterationsOptions o;
  o.hardening = {0.0, 0.1};
  o.n = 4;
  o.steps = 10;
  o.solver.epsilon = 1e-6;
  const auto curves = iterations_vs_hardening(o);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[1].hardening, 0.1);
  EXPECT_EQ(curves[0].iterations.size(), 10u);
  EXPECT_EQ(curves[0].P.size(), 10u);
}

TEST(Experiments, MicropolarCircleYieldsLaterThanCauchy) {
  const RunConfig mp = preset("fig1.circle");
  const RunConfig ca = preset("fig1.circle.cauchy");
  const auto rm = Solver(mp.grid, mp.materials, mp.solver).run(mp.loading);
  const auto rc = Solver(ca.grid, ca.materials, ca.solver).run(ca.loading);
  const auto om = yield_onset(rm.steps, 0, 1), oc = yield_onset(rc.steps, 0, 1);
  ASSERT_TRUE(om.has_value());
  ASSERT_TRUE(oc.has_value());
  EXPECT_GT(rm.steps[*om - 1].E(0, 1), rc.steps[*oc - 1].E(0, 1));
}
