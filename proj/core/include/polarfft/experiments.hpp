#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polarfft/config.hpp"
#include "polarfft/solver.hpp"

namespace polarfft {

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();

/// Configuration keys of a named experiment preset. Throws ConfigError for
/// unknown names.
ConfigMap preset_config(const std::string& name);

/// If `cfg` names a `preset`, returns the preset keys overridden by `cfg`;
/// otherwise returns `cfg` unchanged.
ConfigMap resolve_preset(const ConfigMap& cfg);

/// Counter-clockwise area enclosed by the (E_kl, T_kl) curve from the
/// natural state through every step and back to the start, by the
/// trapezoid rule. Equals the work of T_kl on E_kl over the path.
double loop_area(const std::vector<StepReport>& steps, int k, int l);

/// Sum of the per-step dissipation.
double total_dissipation(const std::vector<StepReport>& steps);

/// First step at which T_eq departs from the initial linear response by
/// more than `relative` (relative to the linear prediction). Linear slope
/// is taken from step 1 against the strain component (k, l).
std::optional<int> yield_onset(const std::vector<StepReport>& steps, int k, int l,
                               double relative = 0.01);

/// Per-cycle maximum of M_eq for a path of `cycles` equal cycles.
std::vector<double> cycle_peaks_m_eq(const std::vector<StepReport>& steps, int cycles);

struct LengthScanOptions {
  VoxelGrid grid;
  std::vector<double> elastic_lengths;
  std::vector<double> plastic_lengths;
  LoadingPath loading;
  SolverConfig solver;
};

struct LengthScanPoint {
  double elastic_length = 0.0;
  double plastic_length = 0.0;
  double T32 = 0.0;  ///< <t_32> at the last step
  double M11 = 0.0;  ///< <m_11> at the last step
  int iterations = 0;  ///< total over the run
};

/// Default scan: four spheres at 20% in a 16^3 cell, E32' = 1 and
/// Gamma11' = 1 for 100 steps of 0.01, local metric at 1e-5.
LengthScanOptions default_length_scan(int n = 16);

/// Runs the table3(l_e, l_p) material at every (l_e, l_p) pair, l_e outer.
std::vector<LengthScanPoint> scan_lengths(const LengthScanOptions& options);

struct BenchOptions {
  std::vector<int> sizes{1, 2, 4, 8, 16, 32};  ///< voxels per axis
  int repeats = 10;
  int steps = 100;
  double dt = 0.01;
  SolverConfig solver{1e-5, ErrorKind::Local, 10000};
};

struct BenchRow {
  int n = 0;  ///< voxels per axis
  std::size_t voxels = 0;
  int repeats = 0;
  double mean_seconds = 0.0;  ///< wall time of one full run
  double min_seconds = 0.0;
  std::size_t working_bytes = 0;  ///< solver field and cache storage
  int iterations = 0;  ///< total over one run
  bool power_of_two = true;
};

/// Times full runs of the 50% laminate (table4, E13' = 1, Gamma32' = 1).
std::vector<BenchRow> bench(const BenchOptions& options);

/// Least-squares slope of log(time) against log(n log n) over the given
/// rows (n = voxel count; n log n is taken as n log2 n with a floor of n).
double nlogn_slope(const std::vector<BenchRow>& rows);

struct IterationsOptions {
  std::vector<double> hardening{0.0, 0.001, 0.005, 0.01, 0.05, 0.1};
  int n = 8;  ///< 8^3 laminate
  int steps = 100;
  double dt = 0.01;
  SolverConfig solver{1e-8, ErrorKind::Local, 100000};
};

struct IterationsCurve {
  double hardening = 0.0;
  std::vector<int> iterations;  ///< per step
  std::vector<double> P;
  std::vector<double> Q;
};

/// Iterations per step on table5.admissible(x) laminates.
std::vector<IterationsCurve> iterations_vs_hardening(const IterationsOptions& options);

}  // namespace polarfft
