#include "polarfft/material.hpp"

#include <cmath>
#include <sstream>

#include "polarfft/errors.hpp"

namespace polarfft {

namespace {

std::string check(const PhaseParams& p, bool require_alpha_zero) {
  for (double x : {p.lambda, p.mu, p.kappa, p.alpha, p.beta, p.gamma, p.t_yield,
                   p.t_hardening, p.m_yield, p.m_hardening, p.a1, p.b1}) {
    if (!std::isfinite(x)) return "non-finite material constant";
  }
  auto fail = [](const char* what, double value, const char* bound) {
    std::ostringstream os;
    os << what << " = " << value << " must be " << bound;
    return os.str();
  };
  if (!(3.0 * p.lambda + 2.0 * p.mu > 0.0))
    return fail("3*lambda + 2*mu", 3.0 * p.lambda + 2.0 * p.mu, "> 0");
  if (!(p.mu > 0.0)) return fail("mu", p.mu, "> 0");
  if (!(p.kappa > 0.0)) return fail("kappa", p.kappa, "> 0");
  if (!(3.0 * p.alpha + p.beta + p.gamma > 0.0))
    return fail("3*alpha + beta + gamma", 3.0 * p.alpha + p.beta + p.gamma, "> 0");
  if (!(p.gamma + p.beta > 0.0)) return fail("gamma + beta", p.gamma + p.beta, "> 0");
  if (!(p.gamma - p.beta > 0.0)) return fail("gamma - beta", p.gamma - p.beta, "> 0");
  if (!(p.t_yield > 0.0)) return fail("t_Y", p.t_yield, "> 0");
  if (!(p.m_yield > 0.0)) return fail("m_Y", p.m_yield, "> 0");
  if (!(p.t_hardening >= 0.0)) return fail("t_H", p.t_hardening, ">= 0");
  if (!(p.m_hardening >= 0.0)) return fail("m_H", p.m_hardening, ">= 0");
  if (!(p.a1 > 0.0)) return fail("a1", p.a1, "> 0");
  if (!(p.b1 > 0.0)) return fail("b1", p.b1, "> 0");
  if (require_alpha_zero && p.alpha != 0.0)
    return fail("alpha", p.alpha, "0 for the closed-form return map");
  return {};
}

}  // namespace

void validate(const PhaseParams& p, bool require_alpha_zero) {
  if (auto msg = check(p, require_alpha_zero); !msg.empty()) {
    throw ConfigError("inadmissible phase parameters: " + msg);
  }
}

bool is_admissible(const PhaseParams& p, bool require_alpha_zero) {
  return check(p, require_alpha_zero).empty();
}

Stiffness isotropic_stiffness(double lambda, double mu, double kappa, double alpha,
                              double beta, double gamma) {
  Stiffness s;
  auto d = kronecker;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
          s.A(k, l, m, n) = lambda * d(k, l) * d(m, n) + (mu + kappa) * d(k, m) * d(l, n) +
                            (mu - kappa) * d(k, n) * d(l, m);
          // B_lkmn = alpha d_kl d_mn + beta d_km d_ln + gamma d_kn d_lm, stored
          // with the first slot holding l.
          s.B(l, k, m, n) = alpha * d(k, l) * d(m, n) + beta * d(k, m) * d(l, n) +
                            gamma * d(k, n) * d(l, m);
        }
  return s;
}

Stiffness assemble_stiffness(const PhaseParams& p) {
  validate(p, /*require_alpha_zero=*/false);
  return isotropic_stiffness(p.lambda, p.mu, p.kappa, p.alpha, p.beta, p.gamma);
}

StressPair elastic_stress(const PhaseParams& p, const Tensor2& e_el, const Tensor2& g_el) {
  StressPair r;
  r.t = p.lambda * trace(e_el) * Tensor2::identity() + 2.0 * p.mu * sym(e_el) +
        2.0 * p.kappa * skew(e_el);
  r.m = p.alpha * trace(g_el) * Tensor2::identity() + (p.beta + p.gamma) * sym(g_el) +
        (p.beta - p.gamma) * skew(g_el);
  return r;
}

StrainPair elastic_strain(const PhaseParams& p, const Tensor2& t, const Tensor2& m) {
  const Tensor2 I = Tensor2::identity();
  StrainPair r;
  r.e = deviator(sym(t)) * (1.0 / (2.0 * p.mu)) +
        (trace(t) / (3.0 * (3.0 * p.lambda + 2.0 * p.mu))) * I + skew(t) * (1.0 / (2.0 * p.kappa));
  r.g = deviator(sym(m)) * (1.0 / (p.beta + p.gamma)) +
        (trace(m) / (3.0 * (3.0 * p.alpha + p.beta + p.gamma))) * I +
        skew(m) * (1.0 / (p.beta - p.gamma));
  return r;
}

LengthScales length_scales(const PhaseParams& p) {
  return {std::sqrt(p.gamma / p.mu), std::sqrt(p.a1 / p.b1)};
}

void MaterialTable::validate(bool require_alpha_zero) const {
  if (phases.empty()) throw ConfigError("material table '" + name + "' has no phases");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    try {
      polarfft::validate(phases[i], require_alpha_zero);
    } catch (const ConfigError& e) {
      throw ConfigError("phase " + std::to_string(i) + " of '" + name + "': " + e.what());
    }
  }
}

namespace presets {

namespace {

PhaseParams row(double lambda, double mu, double kappa, double alpha, double beta,
                double gamma, double tY, double tH, double mY, double mH, double a1,
                double b1) {
  return PhaseParams{lambda, mu, kappa, alpha, beta, gamma, tY, tH, mY, mH, a1, b1};
}

// Parses "base(x,y,...)" into base and numbers.
std::pair<std::string, std::vector<double>> split_call(std::string_view s) {
  auto open = s.find('(');
  if (open == std::string_view::npos) return {std::string(s), {}};
  if (s.back() != ')') throw ConfigError("malformed preset name '" + std::string(s) + "'");
  std::string base(s.substr(0, open));
  std::vector<double> args;
  std::string_view inner = s.substr(open + 1, s.size() - open - 2);
  while (!inner.empty()) {
    auto comma = inner.find(',');
    std::string tok(inner.substr(0, comma));
    try {
      std::size_t used = 0;
      args.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad numeric argument '" + tok + "' in preset '" + std::string(s) + "'");
    }
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return {base, args};
}

}  // namespace

MaterialTable table1() {
  return {"table1",
          {row(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.125, 0.5, 0.125, 1.5, 1.5),
           row(2.0, 2.0, 2.0, 0.0, 0.0, 2.0, 0.75, 0.25, 0.75, 0.25, 1.5, 1.5)}};
}

MaterialTable table1_cauchy() {
  return {"table1.cauchy",
          {row(1.0, 1.0, 0.0001, 0.0, 0.0, 0.0001, 0.5, 0.125, 1000.0, 0.0, 1.5, 1000.0),
           row(2.0, 2.0, 0.0001, 0.0, 0.0, 0.0001, 0.75, 0.25, 1000.0, 0.0, 1.5, 1000.0)}};
}

MaterialTable table2() {
  return {"table2",
          {row(1.0, 1.0, 1.0, 0.0, 1.0, 2.0, 2.5, 0.0, 0.005, 0.0025, 1.5, 1.5),
           row(2.0, 2.0, 2.0, 0.0, 2.0, 4.0, 2.5, 0.0, 0.005, 0.0025, 1.5, 1.5)}};
}

MaterialTable table2_fatigue(double t_yield, double m_hardening) {
  MaterialTable t = table2();
  std::ostringstream os;
  os << "table2.fatigue(" << t_yield << "," << m_hardening << ")";
  t.name = os.str();
  for (auto& p : t.phases) {
    p.t_yield = t_yield;
    p.m_hardening = m_hardening;
  }
  return t;
}

MaterialTable table2_elastic() {
  MaterialTable t = table2();
  t.name = "table2.elastic";
  for (auto& p : t.phases) {
    p.t_yield = 1.0e6;
    p.m_yield = 1.0e6;
  }
  return t;
}

MaterialTable table3(double le, double lp) {
  if (!(le > 0.0) || !(lp > 0.0)) throw ConfigError("table3 length scales must be positive");
  auto phase = [&](double gamma, double tY, double tH, double mY, double mH) {
    const double b = 1.5;
    const double stiff = gamma / (le * le);
    return row(stiff, stiff, stiff, 0.0, gamma / 2.0, gamma, tY, tH, mY, mH, b * lp * lp, b);
  };
  std::ostringstream os;
  os << "table3(" << le << "," << lp << ")";
  return {os.str(), {phase(1.0, 0.5, 0.125, 0.5, 0.125), phase(2.0, 0.75, 0.25, 0.75, 0.25)}};
}

MaterialTable table4() {
  return {"table4",
          {row(1.0, 1.0, 1.0, 0.0, 0.5, 1.0, 0.5, 0.125, 0.5, 0.125, 1.5, 1.5),
           row(2.0, 2.0, 2.0, 0.0, 1.0, 2.0, 0.75, 0.25, 0.75, 0.25, 1.5, 1.5)}};
}

MaterialTable table5(double x) {
  std::ostringstream os;
  os << "table5(" << x << ")";
  return {os.str(),
          {row(1.0, 1.0, 1.0, 0.0, 0.5, 0.1, 0.5, 0.1, 0.5, 0.1, 1.5, 1.5),
           row(1.0, 1.0, 1.0, 0.0, 0.5, 1.0, 0.5, x, 0.5, x, 1.5, 1.5)}};
}

MaterialTable table5_admissible(double x) {
  MaterialTable t = table5(x);
  std::ostringstream os;
  os << "table5.admissible(" << x << ")";
  t.name = os.str();
  t.phases[0].beta = 0.5 * t.phases[0].gamma;
  return t;
}

MaterialTable appendix_d_codeverif() {
  return {"appendixD.codeverif",
          {row(1.0, 1.0, 0.5, 0.0, 0.5, 1.0, 4.0, 0.0, 4.0, 0.0, 1.5, 1.5),
           row(1.5, 1.5, 0.75, 0.0, 0.25, 1.5, 4.5, 0.0, 4.5, 0.0, 1.5, 1.5)}};
}

MaterialTable appendix_d_convergence() {
  return {"appendixD.convergence",
          {row(1.0, 1.0, 0.5, 0.0, 0.5, 1.0, 1.0, 0.0, 1.0, 0.0, 1.5, 1.5),
           row(1.5, 1.5, 0.75, 0.0, 0.25, 1.5, 1.5, 0.0, 1.5, 0.0, 1.5, 1.5)}};
}

MaterialTable by_name(std::string_view name) {
  auto [base, args] = split_call(name);
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw ConfigError("preset '" + base + "' expects " + std::to_string(n) + " argument(s)");
  };
  if (base == "table1") { want(0); return table1(); }
  if (base == "table1.cauchy") { want(0); return table1_cauchy(); }
  if (base == "table2") { want(0); return table2(); }
  if (base == "table2.elastic") { want(0); return table2_elastic(); }
  if (base == "table2.fatigue") { want(2); return table2_fatigue(args[0], args[1]); }
  if (base == "table3") {
    if (args.empty()) return table3(1.0, 1.0);
    want(2);
    return table3(args[0], args[1]);
  }
  if (base == "table4") { want(0); return table4(); }
  if (base == "table5.admissible") {
    if (args.empty()) return table5_admissible(0.0);
    want(1);
    return table5_admissible(args[0]);
  }
  if (base == "table5") {
    if (args.empty()) return table5(0.0);
    want(1);
    return table5(args[0]);
  }
  if (base == "appendixD.codeverif") { want(0); return appendix_d_codeverif(); }
  if (base == "appendixD.convergence") { want(0); return appendix_d_convergence(); }
  throw ConfigError("unknown material preset '" + std::string(name) + "'");
}

std::vector<std::string> names() {
  return {"table1",        "table1.cauchy",        "table2",
          "table2.elastic", "table2.fatigue(tY,mH)", "table3(le,lp)",
          "table4",        "table5(x)",            "table5.admissible(x)",
          "appendixD.codeverif",
          "appendixD.convergence"};
}

}  // namespace presets

}  // namespace polarfft
