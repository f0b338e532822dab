#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "polarfft/material.hpp"
#include "polarfft/microstructure.hpp"
#include "polarfft/plasticity.hpp"
#include "polarfft/solver.hpp"

namespace polarfft {

/// Mean strain rate [[1,2,3],[4,5,6],[7,8,9]] of the manufactured solution.
Tensor2 manufactured_mean_strain_rate();
/// Mean curvature rate [[1.5,2.5,3.5],[4.5,5.5,6.5],[7.5,8.5,9.5]].
Tensor2 manufactured_mean_curvature_rate();

struct ManufacturedStrains {
  Tensor2 e;
  Tensor2 g;
  Tensor2 e_rate;
  Tensor2 g_rate;
};

/// Manufactured displacement and microrotation u_i = phi_i = t S(x) with
/// S = sin(2 pi x1/L1) sin(2 pi x2/L2) sin(2 pi x3/L3), plus the mean
/// strain E(t) = t Edot and curvature Gamma(t) = t Gdot. Strains follow
/// e_kl = u_l,k + eps_lkm phi_m and g_kl = phi_k,l. `scale` multiplies the
/// whole solution.
ManufacturedStrains manufactured_strains(const Vec3& x, double t, Vec3 lengths = {1.0, 1.0, 1.0},
                                         double scale = 1.0);

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-13;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  int max_steps = 1000000;
};

/// Strain and curvature rates as functions of time.
using RateFunction = std::function<void(double t, Tensor2& e_rate, Tensor2& g_rate)>;

struct PointTrajectory {
  std::vector<double> times;
  std::vector<PointState> states;
};

/// Integrates t' = A_ep:e', m' = B_ep:g' with the max(., 0) loading switch,
/// from the natural state at times.front(), by an adaptive embedded 5(4)
/// Runge-Kutta scheme. Yield onset is located by bisection on the step
/// size. Output is sampled at `times`.
///
/// Throws ConvergenceError if the step size underflows or the step budget
/// is exhausted.
PointTrajectory integrate_point_tangent(const PhaseParams& params, const RateFunction& rates,
                                        const std::vector<double>& times,
                                        const OdeOptions& options = {});

/// Per step maxima over voxels and components of |a - a_m|.
struct MnmsStepError {
  int node = 0;
  double time = 0.0;
  std::array<double, 4> max_error{};  ///< e, g, t, m
  int iterations = 0;
};

struct MnmsReport {
  std::vector<MnmsStepError> steps;
  /// voxel_max[x][f]: largest error of field f at voxel x over all steps.
  std::vector<std::array<double, 4>> voxel_max;
  double max_error = 0.0;
};

struct MnmsOptions {
  int steps = 100;
  double dt = 0.01;
  double scale = 1.0;  ///< multiplies the manufactured solution
  SolverConfig solver{1e-9, ErrorKind::Local, 10000};
  OdeOptions ode;
};

/// Runs the solver with the manufactured stresses subtracted from the
/// polarizations and compares every accepted step with the manufactured
/// fields sampled at voxel centres.
MnmsReport mnms_run(const VoxelGrid& grid, const MaterialTable& materials,
                    const MnmsOptions& options = {});

/// 4x4x4 cube with a centred 2x2x2 block of phase 0 inside phase 1.
VoxelGrid mnms_geometry();

enum class ConvergenceGeometry { Laminate50, CenteredSphere };

ConvergenceGeometry parse_convergence_geometry(const std::string& name);
std::string to_string(ConvergenceGeometry g);
VoxelGrid convergence_geometry(ConvergenceGeometry kind, int n);

struct ConvergenceTable {
  ConvergenceGeometry geometry{};
  std::vector<int> space_levels;  ///< voxels per axis
  std::vector<int> time_levels;   ///< number of time steps over [0, 1]
  /// T12 at t = 1 for [space][time].
  std::vector<std::vector<double>> T12;
  /// |T12 - T12(finest space, finest time)|.
  std::vector<std::vector<double>> error;

  /// Spread (max - min) of the error along the space axis at the finest
  /// time level, and along the time axis at the finest space level.
  double space_spread() const;
  double time_spread() const;
};

struct ConvergenceOptions {
  SolverConfig solver{1e-4, ErrorKind::Average, 10000};
  double final_time = 1.0;
};

/// E12' = 1 on the appendixD.convergence material pair. Levels are sorted
/// ascending; the last of each is the reference.
ConvergenceTable convergence_study(ConvergenceGeometry kind, std::vector<int> space_levels,
                                   std::vector<int> time_levels,
                                   const ConvergenceOptions& options = {});

}  // namespace polarfft
