#pragma once

#include "polarfft/material.hpp"
#include "polarfft/tensors.hpp"

namespace polarfft {

/// Converged constitutive state at one material point and one time node.
/// Plastic strains are not stored; they follow from e minus the elastic
/// compliance applied to t (and likewise for the curvature).
struct PointState {
  Tensor2 e;  ///< total micropolar strain
  Tensor2 g;  ///< total micro-curvature
  Tensor2 t;  ///< force stress
  Tensor2 m;  ///< couple stress
  double p = 0.0;  ///< macro cumulative plastic strain
  double q = 0.0;  ///< micro cumulative plastic strain

  friend bool operator==(const PointState&, const PointState&) = default;
};

struct TrialState {
  Tensor2 t_trial;
  Tensor2 m_trial;
};

/// Relative tolerance for yield-surface postconditions (times the yield
/// stress of the branch).
inline constexpr double kYieldTolerance = 1e-10;

/// sqrt(a1 s_(kl) s_(kl) + a2 s_[kl] s_[kl]) with s the deviator of t.
double equivalent_stress(const PhaseParams& p, const Tensor2& t);

/// sqrt(b1 m_(kl) m_(kl) + b2 m_[kl] m_[kl]); no deviatoric split.
double equivalent_couple_stress(const PhaseParams& p, const Tensor2& m);

/// f = t_eq - (t_Y + t_H p)
double yield_f(const PhaseParams& p, const Tensor2& t, double pl);
/// g = m_eq - (m_Y + m_H q)
double yield_g(const PhaseParams& p, const Tensor2& m, double q);

/// df/dt = (a1 s_(kl) + a2 s_[kl]) / t_eq. Zero tensor when t_eq == 0.
Tensor2 macro_flow_direction(const PhaseParams& p, const Tensor2& t);
/// dg/dm = (b1 m_(kl) + b2 m_[kl]) / m_eq. Zero tensor when m_eq == 0.
Tensor2 micro_flow_direction(const PhaseParams& p, const Tensor2& m);

TrialState trial_state(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                       const PointState& prev);

/// Closed-form micropolar radial return. Macro and micro branches are
/// independent; each is elastic iff its trial equivalent stress is strictly
/// below the current yield radius.
///
/// Throws ConfigError for alpha != 0 or inadmissible parameters.
PointState radial_return(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                         const PointState& prev);

/// radial_return without the parameter checks, for callers that validated
/// the material table once up front.
PointState radial_return_unchecked(const PhaseParams& p, const Tensor2& e_new,
                                   const Tensor2& g_new, const PointState& prev);

/// Independent backward-Euler solve of the same step: the stress equations
/// are solved as dense 9x9 linear systems for a given multiplier and the
/// multiplier is found by safeguarded Newton/bisection on the consistency
/// residual. Used to test radial_return.
///
/// Throws ConvergenceError if the root search fails.
PointState implicit_eb_oracle(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                              const PointState& prev);

struct Tangents {
  Tensor4 A_ep;
  Tensor4 B_ep;  ///< same (l,k,m,n) slot order as Stiffness::B
};

/// Elastoplastic continuum moduli. A branch is treated as plastic when its
/// yield function is within kYieldTolerance of zero.
Tangents continuum_tangents(const PhaseParams& p, const Tensor2& t, const Tensor2& m, double pl,
                            double q);

/// Discrete mechanical dissipation rate between two accepted states of one
/// point:
///   [t:de_p + m_kl dg_p_lk - t_H p dp - m_H q dq] / dt
/// with plastic increments recovered from the elastic compliance. A branch
/// whose cumulative plastic strain did not move contributes exactly zero.
double dissipation_increment(const PhaseParams& p, const PointState& prev,
                             const PointState& next, double dt);

}  // namespace polarfft
