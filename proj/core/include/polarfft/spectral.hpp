#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "polarfft/tensors.hpp"

namespace polarfft {

using Vec3 = std::array<double, 3>;
using ComplexVec3 = std::array<Complex, 3>;
using ComplexMat6 = std::array<Complex, 36>;  ///< row-major 6x6

/// Discrete Fourier variable of a periodic N1 x N2 x N3 cell.
///
/// Real fields are stored with x1 fastest. Spectral fields use the
/// half-spectrum layout of a real-to-complex transform: k1 runs over
/// [0, N1/2] and is fastest, then k2, then k3.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(std::array<int, 3> dims, Vec3 lengths);

  const std::array<int, 3>& dims() const { return dims_; }
  const Vec3& lengths() const { return lengths_; }
  std::size_t voxels() const { return voxels_; }
  std::size_t spectral_size() const { return spectral_size_; }
  int half_n1() const { return dims_[0] / 2 + 1; }

  /// Signed index in FFT order, Nyquist folded to -N/2 for even N.
  static int signed_index(int k, int n) { return 2 * k < n ? k : k - n; }

  std::array<int, 3> bin_indices(std::size_t bin) const;
  std::size_t bin(int k1, int k2, int k3) const;

  /// 2 pi (k1/L1, k2/L2, k3/L3) with signed indices.
  Vec3 wavevector(int k1, int k2, int k3) const;
  Vec3 wavevector(std::size_t bin) const;

  /// True when some component of the bin is a Nyquist index, so that the
  /// conjugate partner does not carry the negated wavevector.
  bool has_nyquist(std::size_t bin) const;

  /// Wavevector of the conjugate partner (-k mod N) of this bin.
  Vec3 partner_wavevector(std::size_t bin) const;

 private:
  std::array<int, 3> dims_{1, 1, 1};
  Vec3 lengths_{1.0, 1.0, 1.0};
  std::size_t voxels_ = 1;
  std::size_t spectral_size_ = 1;
};

/// Componentwise 3D transforms of Tensor2 fields (9 transforms per call).
/// Forward is unnormalized; inverse divides by the voxel count.
class FftPlan {
 public:
  explicit FftPlan(const FrequencyGrid& grid);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  const FrequencyGrid& grid() const { return grid_; }

  /// Throws ConfigError on size mismatch.
  void forward(const std::vector<Tensor2>& field, std::vector<ComplexTensor2>& out) const;
  void inverse(const std::vector<ComplexTensor2>& in, std::vector<Tensor2>& field) const;

 private:
  struct Impl;
  FrequencyGrid grid_;
  std::unique_ptr<Impl> impl_;
};

std::vector<ComplexTensor2> fft_forward(const FrequencyGrid& grid,
                                        const std::vector<Tensor2>& field);
std::vector<Tensor2> fft_inverse(const FrequencyGrid& grid,
                                 const std::vector<ComplexTensor2>& spectrum);

/// Rebuilds the full N1 x N2 x N3 spectrum (k1 fastest) from a half spectrum
/// using Hermitian symmetry.
std::vector<ComplexTensor2> expand_full_spectrum(const FrequencyGrid& grid,
                                                 const std::vector<ComplexTensor2>& half);

/// Kinematic fluctuations of the reference medium driven by polarizations
/// at one wavevector.
struct KinematicHat {
  ComplexTensor2 e{};
  ComplexTensor2 g{};
  ComplexVec3 u{};
  ComplexVec3 phi{};
};

/// Solves the reference-medium balance equations at wavevector xi != 0,
/// with polarization stress tau and couple polarization mu entering as
/// t = A0:e + tau and m_kl = B0_lkmn g_mn + mu_kl. Throws ConfigError if the
/// per-frequency system is singular.
KinematicHat greens_solve(const Tensor4& A0, const Tensor4& B0, const Vec3& xi,
                          const ComplexTensor2& tau, const ComplexTensor2& mu);

/// Per-frequency inverses of the 6-dof reference operator.
struct GreensCache {
  FrequencyGrid grid;
  Tensor4 A0;
  Tensor4 B0;
  std::vector<ComplexMat6> inverse;       ///< per half-spectrum bin; bin 0 unused
  std::vector<std::size_t> dual;          ///< index into dual_inverse, or npos
  std::vector<ComplexMat6> dual_inverse;  ///< operator at the partner wavevector

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Throws ConfigError for a singular frequency (inadmissible reference
/// medium).
GreensCache build_greens_cache(const Tensor4& A0, const Tensor4& B0, const FrequencyGrid& grid);

/// Maps polarization spectra to strain and curvature fluctuation spectra in
/// place-safe fashion (outputs may not alias inputs). The zero-frequency bin
/// of both outputs is set to exactly zero. Bins with a Nyquist index use the
/// Hermitian average of the operators at the bin and at its partner, so the
/// inverse transform of the result is real.
void apply_greens(const GreensCache& cache, const std::vector<ComplexTensor2>& tau_hat,
                  const std::vector<ComplexTensor2>& mu_hat, std::vector<ComplexTensor2>& e_hat,
                  std::vector<ComplexTensor2>& g_hat);

}  // namespace polarfft
