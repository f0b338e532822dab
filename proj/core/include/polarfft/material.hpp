#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarfft/tensors.hpp"

namespace polarfft {

/// Isotropic micropolar elastoplastic constants of one phase.
///
/// Elastic: lambda, mu, kappa [Pa]; alpha, beta, gamma [Pa m^2].
/// Plastic: macro yield stress and linear hardening (t_Y, t_H), micro yield
/// couple stress and hardening (m_Y, m_H), and yield-surface weights a1, b1.
/// The skew weights a2, b2 are not free: they are tied to the elastic
/// constants so that the return map has a closed form.
struct PhaseParams {
  double lambda = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double t_yield = 0.0;
  double t_hardening = 0.0;
  double m_yield = 0.0;
  double m_hardening = 0.0;
  double a1 = 0.0;
  double b1 = 0.0;

  /// a2 = a1 mu / kappa
  double a2() const { return a1 * mu / kappa; }
  /// b2 = b1 (gamma + beta) / (gamma - beta)
  double b2() const { return b1 * (gamma + beta) / (gamma - beta); }

  friend bool operator==(const PhaseParams&, const PhaseParams&) = default;
};

/// Throws ConfigError naming the first violated bound. Checks the strain
/// energy bounds, positivity of the yield parameters and, when
/// `require_alpha_zero`, that alpha vanishes.
void validate(const PhaseParams& p, bool require_alpha_zero = true);

/// Returns true when `validate` would accept p.
bool is_admissible(const PhaseParams& p, bool require_alpha_zero = true);

struct Stiffness {
  Tensor4 A;  ///< t_kl = A_klmn e_mn
  Tensor4 B;  ///< m_kl = B_lkmn gamma_mn, stored in (l,k,m,n) order
};

Stiffness assemble_stiffness(const PhaseParams& p);

/// Isotropic stiffness from the six elastic constants without admissibility
/// checks. Used for reference media and tests of degenerate limits.
Stiffness isotropic_stiffness(double lambda, double mu, double kappa, double alpha,
                              double beta, double gamma);

struct StressPair {
  Tensor2 t;
  Tensor2 m;
};

/// Closed isotropic form of the elastic law; agrees with the contraction of
/// assemble_stiffness to rounding.
StressPair elastic_stress(const PhaseParams& p, const Tensor2& e_el, const Tensor2& g_el);

struct StrainPair {
  Tensor2 e;
  Tensor2 g;
};

/// Inverse of elastic_stress (isotropic compliance).
StrainPair elastic_strain(const PhaseParams& p, const Tensor2& t, const Tensor2& m);

struct LengthScales {
  double elastic;  ///< sqrt(gamma / mu)
  double plastic;  ///< sqrt(a1 / b1)
};

LengthScales length_scales(const PhaseParams& p);

/// Phase list indexed by phase ID.
struct MaterialTable {
  std::string name;
  std::vector<PhaseParams> phases;

  std::size_t size() const { return phases.size(); }
  const PhaseParams& operator[](std::size_t id) const { return phases.at(id); }
  void validate(bool require_alpha_zero = true) const;
};

namespace presets {

// Phase ID 0 is the first row of each table, ID 1 the second.
MaterialTable table1();
MaterialTable table1_cauchy();
MaterialTable table2();
/// Ratcheting table with both phases' t_Y and m_H overridden (fatigue study).
MaterialTable table2_fatigue(double t_yield, double m_hardening);
/// All-elastic control for the ratcheting table: yield stresses raised far
/// beyond anything the loading reaches.
MaterialTable table2_elastic();
MaterialTable table3(double elastic_length, double plastic_length);
MaterialTable table4();
MaterialTable table5(double phase2_hardening);
/// table5 with phase 0 beta lowered to gamma / 2 (as in phase 1), since the
/// listed beta > gamma violates gamma - beta > 0.
MaterialTable table5_admissible(double phase2_hardening);
MaterialTable appendix_d_codeverif();
MaterialTable appendix_d_convergence();

/// Resolves names like "table1", "table1.cauchy", "table3(0.1,0.5)",
/// "table5(0.01)", "appendixD.codeverif". Throws ConfigError if unknown.
MaterialTable by_name(std::string_view name);

/// Names accepted by by_name (parameterized ones listed with defaults).
std::vector<std::string> names();

}  // namespace presets

}  // namespace polarfft
