#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "polarfft/material.hpp"
#include "polarfft/microstructure.hpp"
#include "polarfft/plasticity.hpp"
#include "polarfft/spectral.hpp"

namespace polarfft {

/// Prescribed average strain and curvature at the time nodes t_1 = 0 < t_2 <
/// ... < t_{N+1}. Node 0 is the natural state.
struct LoadingPath {
  std::vector<double> times;
  std::vector<Tensor2> E;
  std::vector<Tensor2> Gamma;

  int steps() const { return times.empty() ? 0 : static_cast<int>(times.size()) - 1; }

  /// Throws ConfigError unless the path is well formed.
  void validate() const;

  /// E(t) = t Edot, Gamma(t) = t Gdot at t = n dt.
  static LoadingPath constant_rate(const Tensor2& E_rate, const Tensor2& Gamma_rate, double dt,
                                   int steps);
  /// Triangular cycles starting at zero: rate +1 for half a period, then -1,
  /// repeated `cycles` times. The half period must be a whole number of
  /// steps.
  static LoadingPath cyclic(const Tensor2& E_rate, const Tensor2& Gamma_rate, double dt,
                            double period, int cycles);
  static LoadingPath from_table(std::vector<double> times, std::vector<Tensor2> E,
                                std::vector<Tensor2> Gamma);
};

enum class ErrorKind { Average, Local };

struct SolverConfig {
  double epsilon = 1e-6;
  ErrorKind error_kind = ErrorKind::Local;
  int max_iterations = 10000;

  void validate() const;
};

/// Accepted state at the last converged time node plus the strain and
/// curvature fields of the node before it (for the predictor).
struct FieldState {
  int node = 0;                 ///< index of the accepted time node
  std::vector<PointState> points;
  std::vector<Tensor2> e_before;
  std::vector<Tensor2> g_before;
};

struct StepReport {
  int node = 0;
  double time = 0.0;
  Tensor2 E;
  Tensor2 Gamma;
  Tensor2 T;   ///< <t>
  Tensor2 M;   ///< <m>
  double T_eq = 0.0;   ///< <t_eq>
  double M_eq = 0.0;   ///< <m_eq>
  double P = 0.0;      ///< <p>
  double Q = 0.0;      ///< <q>
  int iterations = 0;
  double error = 0.0;
  double dissipation = 0.0;  ///< volume-averaged dissipated energy density of the step
};

struct Snapshot {
  int node = 0;
  double time = 0.0;
  std::vector<PointState> points;
};

struct SolverResult {
  std::vector<StepReport> steps;
  std::vector<Snapshot> snapshots;
};

/// Fixed per-voxel extra polarizations subtracted inside the iteration
/// (tau = t - A0:e - tau_extra, mu = m - B0:g - mu_extra). Called once per
/// step with the target node index.
using PolarizationSource =
    std::function<void(int node, std::vector<Tensor2>& tau_extra, std::vector<Tensor2>& mu_extra)>;

using StepObserver = std::function<void(const StepReport&, const FieldState& before,
                                        const FieldState& after)>;

struct RunOptions {
  std::vector<int> snapshot_nodes;
  PolarizationSource polarization;
  StepObserver observer;
};

/// Volume averages of the phase stiffnesses.
Stiffness reference_medium(const VoxelGrid& grid, const MaterialTable& materials);

/// Initial guess for node n: the uniform averages at the first step, linear
/// extrapolation of the two previous accepted fields afterwards.
void predictor(const FieldState& state, const LoadingPath& path, int node,
               std::vector<Tensor2>& e_guess, std::vector<Tensor2>& g_guess);

/// Relative change between consecutive iterates, max over e, t, g, m. Each
/// field is normalized by the norm of its new spatial average; if that is
/// at most 1e-10 of the largest voxel norm, the largest voxel norm is used
/// instead, and an identically zero field contributes zero. The (g, m) pair
/// is skipped when max|g| max|m| <= 1e-24 max|e| max|t| (round-off only),
/// and vice versa.
double error_metric(const std::vector<PointState>& previous, const std::vector<PointState>& next,
                    ErrorKind kind);

class Solver {
 public:
  /// Validates materials (alpha = 0 required), checks every phase ID has
  /// an entry, and builds the Green's cache.
  Solver(VoxelGrid grid, MaterialTable materials, SolverConfig config);

  const VoxelGrid& grid() const { return grid_; }
  const MaterialTable& materials() const { return materials_; }
  const SolverConfig& config() const { return config_; }
  const GreensCache& cache() const { return cache_; }

  FieldState initial_state() const;

  /// Advances `state` to `node`; throws ConvergenceError after
  /// max_iterations passes.
  StepReport step(FieldState& state, const LoadingPath& path, int node,
                  const PolarizationSource& polarization = {}) const;

  SolverResult run(const LoadingPath& path, const RunOptions& options = {}) const;

  /// One constitutive update of all voxels from the accepted state.
  void update_points(const FieldState& state, const std::vector<Tensor2>& e,
                     const std::vector<Tensor2>& g, std::vector<PointState>& out) const;

  /// Strain and curvature produced by one Green's contraction of the
  /// polarizations of `points`, with averages E, Gamma.
  void contract(const std::vector<PointState>& points, const Tensor2& E, const Tensor2& Gamma,
                const std::vector<Tensor2>* tau_extra, const std::vector<Tensor2>* mu_extra,
                std::vector<Tensor2>& e, std::vector<Tensor2>& g) const;

  StepReport summarize(const FieldState& before, const FieldState& after, const LoadingPath& path,
                       int iterations, double error) const;

 private:
  VoxelGrid grid_;
  MaterialTable materials_;
  SolverConfig config_;
  GreensCache cache_;
  FftPlan plan_;
};

}  // namespace polarfft
