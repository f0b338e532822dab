#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>

namespace polarfft {

/// Second-order Cartesian tensor with 9 independent components, row-major
/// storage V(k,l) = v[3k+l]. No symmetry is assumed: micropolar strains and
/// stresses are generally asymmetric.
struct Tensor2 {
  std::array<double, 9> v{};

  constexpr double& operator()(int k, int l) { return v[3 * k + l]; }
  constexpr double operator()(int k, int l) const { return v[3 * k + l]; }
  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }

  static constexpr Tensor2 zero() { return {}; }
  static constexpr Tensor2 identity() {
    Tensor2 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }

  constexpr Tensor2& operator+=(const Tensor2& o) {
    for (std::size_t i = 0; i < 9; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Tensor2& operator-=(const Tensor2& o) {
    for (std::size_t i = 0; i < 9; ++i) v[i] -= o.v[i];
    return *this;
  }
  constexpr Tensor2& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }

  friend constexpr Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
  friend constexpr Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
  friend constexpr Tensor2 operator-(Tensor2 a) { return a *= -1.0; }
  friend constexpr Tensor2 operator*(Tensor2 a, double s) { return a *= s; }
  friend constexpr Tensor2 operator*(double s, Tensor2 a) { return a *= s; }
  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;
};

// The spectral layer hands arrays of Tensor2 straight to FFTW with a
// component stride of 9.
static_assert(sizeof(Tensor2) == 9 * sizeof(double));
static_assert(std::is_standard_layout_v<Tensor2>);

/// Fourth-order tensor, C(k,l,m,n) = c[27k + 9l + 3m + n].
struct Tensor4 {
  std::array<double, 81> c{};

  constexpr double& operator()(int k, int l, int m, int n) {
    return c[27 * k + 9 * l + 3 * m + n];
  }
  constexpr double operator()(int k, int l, int m, int n) const {
    return c[27 * k + 9 * l + 3 * m + n];
  }

  constexpr Tensor4& operator+=(const Tensor4& o) {
    for (std::size_t i = 0; i < 81; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Tensor4& operator-=(const Tensor4& o) {
    for (std::size_t i = 0; i < 81; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Tensor4& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend constexpr Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
  friend constexpr Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
  friend constexpr Tensor4 operator*(Tensor4 a, double s) { return a *= s; }
  friend constexpr Tensor4 operator*(double s, Tensor4 a) { return a *= s; }
  friend constexpr bool operator==(const Tensor4&, const Tensor4&) = default;
};

using Complex = std::complex<double>;
using ComplexTensor2 = std::array<Complex, 9>;

constexpr double kronecker(int i, int j) { return i == j ? 1.0 : 0.0; }

constexpr double levi_civita(int i, int j, int k) {
  // (i-j)(j-k)(k-i)/2 for indices in {0,1,2}
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

constexpr double trace(const Tensor2& V) { return V(0, 0) + V(1, 1) + V(2, 2); }

constexpr Tensor2 transpose(const Tensor2& V) {
  Tensor2 r;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) r(k, l) = V(l, k);
  return r;
}

/// V_(kl) = (V_kl + V_lk)/2
constexpr Tensor2 sym(const Tensor2& V) {
  Tensor2 r;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) r(k, l) = 0.5 * (V(k, l) + V(l, k));
  return r;
}

/// V_[kl] = (V_kl - V_lk)/2
constexpr Tensor2 skew(const Tensor2& V) {
  Tensor2 r;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) r(k, l) = 0.5 * (V(k, l) - V(l, k));
  return r;
}

constexpr Tensor2 deviator(const Tensor2& t) {
  Tensor2 s = t;
  const double h = trace(t) / 3.0;
  s(0, 0) -= h;
  s(1, 1) -= h;
  s(2, 2) -= h;
  return s;
}

constexpr double frobenius(const Tensor2& V, const Tensor2& W) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += V.v[i] * W.v[i];
  return s;
}

inline double norm(const Tensor2& V) { return std::sqrt(frobenius(V, V)); }

/// (C:V)_kl = C_klmn V_mn
constexpr Tensor2 contract(const Tensor4& C, const Tensor2& V) {
  Tensor2 r;
  for (std::size_t i = 0; i < 9; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 9; ++j) s += C.c[9 * i + j] * V.v[j];
    r.v[i] = s;
  }
  return r;
}

/// Couple-stress contraction m_kl = B_lkmn V_mn: the first two indices of a
/// curvature stiffness are swapped relative to the force-stress case because
/// the curvature is defined as gamma_kl = phi_k,l.
constexpr Tensor2 contract_couple(const Tensor4& B, const Tensor2& V) {
  return transpose(contract(B, V));
}

/// V_kl C_klmn W_mn
constexpr double double_contract(const Tensor2& V, const Tensor4& C, const Tensor2& W) {
  return frobenius(V, contract(C, W));
}

/// (V (x) W)_klmn = V_kl W_mn
constexpr Tensor4 outer(const Tensor2& V, const Tensor2& W) {
  Tensor4 r;
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) r.c[9 * i + j] = V.v[i] * W.v[j];
  return r;
}

/// Projector onto the symmetric part: P:V = sym(V).
constexpr Tensor4 symmetric_projector() {
  Tensor4 P;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
          P(k, l, m, n) = 0.5 * (kronecker(k, m) * kronecker(l, n) +
                                 kronecker(k, n) * kronecker(l, m));
  return P;
}

/// A_klmn == A_mnkl to within tol.
inline bool has_major_symmetry(const Tensor4& A, double tol = 0.0) {
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      if (std::abs(A.c[9 * i + j] - A.c[9 * j + i]) > tol) return false;
  return true;
}

}  // namespace polarfft
