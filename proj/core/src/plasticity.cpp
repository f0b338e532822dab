#include "polarfft/plasticity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>

#include "polarfft/errors.hpp"

namespace polarfft {

namespace {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

Vec9 to_vec(const Tensor2& t) {
  Vec9 v;
  for (int i = 0; i < 9; ++i) v[i] = t.v[i];
  return v;
}

Tensor2 from_vec(const Vec9& v) {
  Tensor2 t;
  for (int i = 0; i < 9; ++i) t.v[i] = v[i];
  return t;
}

// Matrix of a linear map on Tensor2, assembled column by column.
Mat9 matrix_of(const std::function<Tensor2(const Tensor2&)>& op) {
  Mat9 M;
  for (int j = 0; j < 9; ++j) {
    Tensor2 basis;
    basis.v[j] = 1.0;
    M.col(j) = to_vec(op(basis));
  }
  return M;
}

void require_closed_form(const PhaseParams& p) {
  if (p.alpha != 0.0) throw ConfigError("radial return requires alpha = 0");
  validate(p);
}

// Root of a strictly decreasing residual on [0, hi] with r(0) > 0.
double decreasing_root(const std::function<double(double)>& r, double hi, double scale,
                       const char* what) {
  double lo = 0.0;
  double r_lo = r(lo);
  double r_hi = r(hi);
  for (int grow = 0; r_hi > 0.0 && grow < 60; ++grow) {
    lo = hi;
    r_lo = r_hi;
    hi *= 2.0;
    r_hi = r(hi);
  }
  if (!(r_lo > 0.0) || r_hi > 0.0) {
    throw ConvergenceError(std::string("implicit oracle: no sign change bracketing the ") + what +
                           " multiplier");
  }
  double x = lo - r_lo * (hi - lo) / (r_hi - r_lo);
  for (int it = 0; it < 200; ++it) {
    const double rx = r(x);
    if (rx == 0.0 || std::abs(rx) <= 1e-15 * scale) return x;
    if (rx > 0.0) {
      lo = x;
      r_lo = rx;
    } else {
      hi = x;
      r_hi = rx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(hi, 1e-300)) return x;
    // Newton with a central-difference slope, rejected when it leaves the bracket.
    const double h = 1e-7 * std::max(hi, 1e-12);
    const double slope = (r(x + h) - r(x - h)) / (2.0 * h);
    double next = x - rx / slope;
    if (!(slope < 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw ConvergenceError(std::string("implicit oracle: ") + what + " multiplier did not converge");
}

}  // namespace

double equivalent_stress(const PhaseParams& p, const Tensor2& t) {
  const Tensor2 s = deviator(t);
  const Tensor2 ss = sym(s);
  const Tensor2 sk = skew(s);
  return std::sqrt(p.a1 * frobenius(ss, ss) + p.a2() * frobenius(sk, sk));
}

double equivalent_couple_stress(const PhaseParams& p, const Tensor2& m) {
  const Tensor2 ms = sym(m);
  const Tensor2 mk = skew(m);
  return std::sqrt(p.b1 * frobenius(ms, ms) + p.b2() * frobenius(mk, mk));
}

double yield_f(const PhaseParams& p, const Tensor2& t, double pl) {
  return equivalent_stress(p, t) - (p.t_yield + p.t_hardening * pl);
}

double yield_g(const PhaseParams& p, const Tensor2& m, double q) {
  return equivalent_couple_stress(p, m) - (p.m_yield + p.m_hardening * q);
}

Tensor2 macro_flow_direction(const PhaseParams& p, const Tensor2& t) {
  const double teq = equivalent_stress(p, t);
  if (teq == 0.0) return {};
  const Tensor2 s = deviator(t);
  return (p.a1 * sym(s) + p.a2() * skew(s)) * (1.0 / teq);
}

Tensor2 micro_flow_direction(const PhaseParams& p, const Tensor2& m) {
  const double meq = equivalent_couple_stress(p, m);
  if (meq == 0.0) return {};
  return (p.b1 * sym(m) + p.b2() * skew(m)) * (1.0 / meq);
}

TrialState trial_state(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                       const PointState& prev) {
  const StressPair inc = elastic_stress(p, e_new - prev.e, g_new - prev.g);
  return {prev.t + inc.t, prev.m + inc.m};
}

PointState radial_return(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                         const PointState& prev) {
  require_closed_form(p);
  return radial_return_unchecked(p, e_new, g_new, prev);
}

PointState radial_return_unchecked(const PhaseParams& p, const Tensor2& e_new,
                                   const Tensor2& g_new, const PointState& prev) {
  const TrialState trial = trial_state(p, e_new, g_new, prev);
  PointState out{e_new, g_new, trial.t_trial, trial.m_trial, prev.p, prev.q};

  const double teq_trial = equivalent_stress(p, trial.t_trial);
  const double radius_n = p.t_yield + p.t_hardening * prev.p;
  if (!(teq_trial < radius_n)) {
    const double stiff = 2.0 * p.a1 * p.mu;
    // p = p_n 2a1mu/(t_H + 2a1mu) + (t_eq^trial - t_Y)/(t_H + 2a1mu), written
    // as an increment so that p >= p_n holds in floating point.
    const double dp = (teq_trial - radius_n) / (p.t_hardening + stiff);
    out.p = prev.p + dp;
    const double radius = p.t_yield + p.t_hardening * out.p;
    const Tensor2 s = deviator(trial.t_trial);
    const double f_sym = radius / (radius + 2.0 * dp * p.a1 * p.mu);
    const double f_skew = radius / (radius + 2.0 * dp * p.a2() * p.kappa);
    out.t = (trace(trial.t_trial) / 3.0) * Tensor2::identity() + f_sym * sym(s) +
            f_skew * skew(s);
  }

  const double meq_trial = equivalent_couple_stress(p, trial.m_trial);
  const double radius2_n = p.m_yield + p.m_hardening * prev.q;
  if (!(meq_trial < radius2_n)) {
    const double stiff = p.b1 * (p.gamma + p.beta);
    const double dq = (meq_trial - radius2_n) / (p.m_hardening + stiff);
    out.q = prev.q + dq;
    const double radius = p.m_yield + p.m_hardening * out.q;
    const double f_sym = radius / (radius + dq * p.b1 * (p.gamma + p.beta));
    const double f_skew = radius / (radius + dq * p.b2() * (p.gamma - p.beta));
    out.m = f_sym * sym(trial.m_trial) + f_skew * skew(trial.m_trial);
  }
  return out;
}

PointState implicit_eb_oracle(const PhaseParams& p, const Tensor2& e_new, const Tensor2& g_new,
                              const PointState& prev) {
  require_closed_form(p);
  const Stiffness C = assemble_stiffness(p);
  const Tensor2 t_trial = prev.t + contract(C.A, e_new - prev.e);
  const Tensor2 m_trial = prev.m + contract_couple(C.B, g_new - prev.g);
  PointState out{e_new, g_new, t_trial, m_trial, prev.p, prev.q};

  const Mat9 I = Mat9::Identity();
  const double a2 = p.a2();
  const double b2 = p.b2();

  // t + (dp/R) A:(a1 s_(mn) + a2 s_[mn]) = t_trial, linear in t for fixed dp.
  const Mat9 macro_flow = matrix_of([&](const Tensor2& t) {
    const Tensor2 s = deviator(t);
    return contract(C.A, p.a1 * sym(s) + a2 * skew(s));
  });
  // m_kl + (dq/R) B_lkmn (b1 m_(nm) + b2 m_[nm]) = m_trial_kl.
  const Mat9 micro_flow = matrix_of([&](const Tensor2& m) {
    return contract_couple(C.B, transpose(p.b1 * sym(m) + b2 * skew(m)));
  });

  const Vec9 t_rhs = to_vec(t_trial);
  auto stress_at = [&](double dp) {
    const double radius = p.t_yield + p.t_hardening * (prev.p + dp);
    const Mat9 M = I + (dp / radius) * macro_flow;
    return from_vec(M.partialPivLu().solve(t_rhs));
  };
  const Vec9 m_rhs = to_vec(m_trial);
  auto couple_at = [&](double dq) {
    const double radius = p.m_yield + p.m_hardening * (prev.q + dq);
    const Mat9 M = I + (dq / radius) * micro_flow;
    return from_vec(M.partialPivLu().solve(m_rhs));
  };

  const double teq_trial = equivalent_stress(p, t_trial);
  if (!(teq_trial < p.t_yield + p.t_hardening * prev.p)) {
    auto residual = [&](double dp) {
      return equivalent_stress(p, stress_at(dp)) - (p.t_yield + p.t_hardening * (prev.p + dp));
    };
    const double hi = teq_trial / (2.0 * p.a1 * p.mu);
    const double dp = residual(0.0) > 0.0 ? decreasing_root(residual, hi, p.t_yield, "macro") : 0.0;
    out.p = prev.p + dp;
    out.t = stress_at(dp);
  }

  const double meq_trial = equivalent_couple_stress(p, m_trial);
  if (!(meq_trial < p.m_yield + p.m_hardening * prev.q)) {
    auto residual = [&](double dq) {
      return equivalent_couple_stress(p, couple_at(dq)) -
             (p.m_yield + p.m_hardening * (prev.q + dq));
    };
    const double hi = meq_trial / (p.b1 * (p.gamma + p.beta));
    const double dq = residual(0.0) > 0.0 ? decreasing_root(residual, hi, p.m_yield, "micro") : 0.0;
    out.q = prev.q + dq;
    out.m = couple_at(dq);
  }
  return out;
}

Tangents continuum_tangents(const PhaseParams& p, const Tensor2& t, const Tensor2& m, double pl,
                            double q) {
  const Stiffness C = assemble_stiffness(p);
  Tangents out{C.A, C.B};

  if (yield_f(p, t, pl) >= -kYieldTolerance * p.t_yield) {
    const Tensor2 n = macro_flow_direction(p, t);
    if (norm(n) == 0.0) throw ConfigError("macro flow direction undefined at t_eq = 0");
    const Tensor2 An = contract(C.A, n);
    const Tensor2 nA = contract(C.A, n);  // major symmetry: n:A == A:n
    const double denom = double_contract(n, C.A, n) + p.t_hardening;
    out.A_ep -= outer(An, nA) * (1.0 / denom);
  }

  if (yield_g(p, m, q) >= -kYieldTolerance * p.m_yield) {
    const Tensor2 n = micro_flow_direction(p, m);
    if (norm(n) == 0.0) throw ConfigError("micro flow direction undefined at m_eq = 0");
    // B_lkrs n_sr n_pq B_qpmn / (n_ba B_abcd n_dc + m_H), with nt = n^T.
    const Tensor2 nt = transpose(n);
    const Tensor2 Bn = contract(C.B, nt);
    const double denom = double_contract(nt, C.B, nt) + p.m_hardening;
    out.B_ep -= outer(Bn, Bn) * (1.0 / denom);
  }
  return out;
}

double dissipation_increment(const PhaseParams& p, const PointState& prev,
                             const PointState& next, double dt) {
  double d = 0.0;
  if (next.p != prev.p) {
    const StrainPair el = elastic_strain(p, next.t - prev.t, Tensor2{});
    const Tensor2 dep = (next.e - prev.e) - el.e;
    d += frobenius(next.t, dep) - p.t_hardening * next.p * (next.p - prev.p);
  }
  if (next.q != prev.q) {
    const StrainPair el = elastic_strain(p, Tensor2{}, next.m - prev.m);
    const Tensor2 dgp = (next.g - prev.g) - el.g;
    // m_kl dg_p_lk
    d += frobenius(next.m, transpose(dgp)) - p.m_hardening * next.q * (next.q - prev.q);
  }
  return d / dt;
}

}  // namespace polarfft
