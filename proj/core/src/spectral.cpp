#include "polarfft/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "polarfft/errors.hpp"
#include "polarfft/parallel.hpp"

namespace polarfft {

namespace {

using Mat6c = Eigen::Matrix<Complex, 6, 6>;
using Vec6c = Eigen::Matrix<Complex, 6, 1>;
using Mat18x6c = Eigen::Matrix<Complex, 18, 6>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

constexpr Complex kI{0.0, 1.0};

// Kinematic map x = (u, phi) -> (e, g) at wavevector xi.
Mat18x6c kinematic_matrix(const Vec3& xi) {
  Mat18x6c D = Mat18x6c::Zero();
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      D(3 * k + l, l) += kI * xi[k];
      for (int m = 0; m < 3; ++m) D(3 * k + l, 3 + m) += levi_civita(l, k, m);
      D(9 + 3 * k + l, 3 + k) += kI * xi[l];
    }
  }
  return D;
}

// Block-diagonal generalized stiffness acting on (vec e, vec g). The curvature
// block pairs with the transposed couple stress, so it is B in its stored
// (l,k,m,n) order.
Mat18 generalized_stiffness(const Tensor4& A0, const Tensor4& B0) {
  Mat18 C = Mat18::Zero();
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      C(r, c) = A0.c[9 * r + c];
      C(9 + r, 9 + c) = B0.c[9 * r + c];
    }
  }
  return C;
}

bool invert_frequency(const Mat18& C, const Vec3& xi, ComplexMat6& out) {
  const Mat18x6c D = kinematic_matrix(xi);
  const Mat6c K = D.adjoint() * C.cast<Complex>() * D;
  Eigen::LLT<Mat6c> llt(K);
  if (llt.info() != Eigen::Success) return false;
  const Mat6c inv = llt.solve(Mat6c::Identity());
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) out[6 * r + c] = inv(r, c);
  return true;
}

// -D^H s for s = (tau, transpose(mu)).
void source(const Vec3& xi, const ComplexTensor2& tau, const ComplexTensor2& mu,
            std::array<Complex, 6>& r) {
  for (int l = 0; l < 3; ++l) {
    Complex acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += xi[k] * tau[3 * k + l];
    r[l] = kI * acc;
  }
  // epsilon_lkm tau_kl for each m
  r[3] = -(tau[3 * 2 + 1] - tau[3 * 1 + 2]);
  r[4] = -(tau[3 * 0 + 2] - tau[3 * 2 + 0]);
  r[5] = -(tau[3 * 1 + 0] - tau[3 * 0 + 1]);
  for (int m = 0; m < 3; ++m) {
    Complex acc = 0.0;
    for (int b = 0; b < 3; ++b) acc += xi[b] * mu[3 * b + m];
    r[3 + m] += kI * acc;
  }
}

void kinematics(const Vec3& xi, const std::array<Complex, 6>& x, ComplexTensor2& e,
                ComplexTensor2& g) {
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      Complex v = kI * xi[k] * x[l];
      for (int m = 0; m < 3; ++m) {
        const double eps = levi_civita(l, k, m);
        if (eps != 0.0) v += eps * x[3 + m];
      }
      e[3 * k + l] = v;
      g[3 * k + l] = kI * xi[l] * x[3 + k];
    }
  }
}

void solve_bin(const ComplexMat6& inv, const Vec3& xi, const ComplexTensor2& tau,
               const ComplexTensor2& mu, ComplexTensor2& e, ComplexTensor2& g) {
  std::array<Complex, 6> r;
  source(xi, tau, mu, r);
  std::array<Complex, 6> x{};
  for (int i = 0; i < 6; ++i) {
    Complex acc = 0.0;
    for (int j = 0; j < 6; ++j) acc += inv[6 * i + j] * r[j];
    x[i] = acc;
  }
  kinematics(xi, x, e, g);
}

ComplexTensor2 conj(const ComplexTensor2& a) {
  ComplexTensor2 out;
  for (int i = 0; i < 9; ++i) out[i] = std::conj(a[i]);
  return out;
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::array<int, 3> dims, Vec3 lengths)
    : dims_(dims), lengths_(lengths) {
  for (int d = 0; d < 3; ++d) {
    if (dims_[d] < 1) throw ConfigError("grid dimension must be >= 1");
    if (!(lengths_[d] > 0.0)) throw ConfigError("cell length must be positive");
  }
  voxels_ = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  spectral_size_ = static_cast<std::size_t>(half_n1()) * dims_[1] * dims_[2];
}

std::array<int, 3> FrequencyGrid::bin_indices(std::size_t bin) const {
  const std::size_t h = static_cast<std::size_t>(half_n1());
  const int k1 = static_cast<int>(bin % h);
  const std::size_t rest = bin / h;
  const int k2 = static_cast<int>(rest % static_cast<std::size_t>(dims_[1]));
  const int k3 = static_cast<int>(rest / static_cast<std::size_t>(dims_[1]));
  return {k1, k2, k3};
}

std::size_t FrequencyGrid::bin(int k1, int k2, int k3) const {
  return static_cast<std::size_t>(k1) +
         static_cast<std::size_t>(half_n1()) *
             (static_cast<std::size_t>(k2) + static_cast<std::size_t>(dims_[1]) * k3);
}

Vec3 FrequencyGrid::wavevector(int k1, int k2, int k3) const {
  const double tau = 2.0 * std::numbers::pi;
  return {tau * signed_index(k1, dims_[0]) / lengths_[0],
          tau * signed_index(k2, dims_[1]) / lengths_[1],
          tau * signed_index(k3, dims_[2]) / lengths_[2]};
}

Vec3 FrequencyGrid::wavevector(std::size_t b) const {
  const auto k = bin_indices(b);
  return wavevector(k[0], k[1], k[2]);
}

bool FrequencyGrid::has_nyquist(std::size_t b) const {
  const auto k = bin_indices(b);
  for (int d = 0; d < 3; ++d)
    if (dims_[d] % 2 == 0 && 2 * k[d] == dims_[d]) return true;
  return false;
}

Vec3 FrequencyGrid::partner_wavevector(std::size_t b) const {
  const auto k = bin_indices(b);
  return wavevector((dims_[0] - k[0]) % dims_[0], (dims_[1] - k[1]) % dims_[1],
                    (dims_[2] - k[2]) % dims_[2]);
}

struct FftPlan::Impl {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

FftPlan::FftPlan(const FrequencyGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  const auto& d = grid.dims();
  int n[3] = {d[2], d[1], d[0]};
  const std::size_t nr = grid.voxels() * 9;
  const std::size_t nc = grid.spectral_size() * 9;
  double* rbuf = fftw_alloc_real(nr);
  fftw_complex* cbuf = fftw_alloc_complex(nc);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->forward =
      fftw_plan_many_dft_r2c(3, n, 9, rbuf, nullptr, 9, 1, cbuf, nullptr, 9, 1, flags);
  impl_->inverse =
      fftw_plan_many_dft_c2r(3, n, 9, cbuf, nullptr, 9, 1, rbuf, nullptr, 9, 1, flags);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!impl_->forward || !impl_->inverse) throw Error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  if (impl_) {
    if (impl_->forward) fftw_destroy_plan(impl_->forward);
    if (impl_->inverse) fftw_destroy_plan(impl_->inverse);
  }
}

void FftPlan::forward(const std::vector<Tensor2>& field, std::vector<ComplexTensor2>& out) const {
  if (field.size() != grid_.voxels()) {
    throw ConfigError("fft_forward: field has " + std::to_string(field.size()) +
                      " voxels, grid has " + std::to_string(grid_.voxels()));
  }
  out.resize(grid_.spectral_size());
  // FFTW does not modify the input of an out-of-place r2c transform.
  auto* in = const_cast<double*>(field.front().v.data());
  fftw_execute_dft_r2c(impl_->forward, in, reinterpret_cast<fftw_complex*>(out.data()));
}

void FftPlan::inverse(const std::vector<ComplexTensor2>& in, std::vector<Tensor2>& field) const {
  if (in.size() != grid_.spectral_size()) {
    throw ConfigError("fft_inverse: spectrum has " + std::to_string(in.size()) +
                      " bins, grid has " + std::to_string(grid_.spectral_size()));
  }
  std::vector<ComplexTensor2> scratch(in);  // c2r overwrites its input
  field.resize(grid_.voxels());
  fftw_execute_dft_c2r(impl_->inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       field.front().v.data());
  const double scale = 1.0 / static_cast<double>(grid_.voxels());
  for (auto& t : field) t *= scale;
}

std::vector<ComplexTensor2> fft_forward(const FrequencyGrid& grid,
                                        const std::vector<Tensor2>& field) {
  std::vector<ComplexTensor2> out;
  FftPlan(grid).forward(field, out);
  return out;
}

std::vector<Tensor2> fft_inverse(const FrequencyGrid& grid,
                                 const std::vector<ComplexTensor2>& spectrum) {
  std::vector<Tensor2> out;
  FftPlan(grid).inverse(spectrum, out);
  return out;
}

std::vector<ComplexTensor2> expand_full_spectrum(const FrequencyGrid& grid,
                                                 const std::vector<ComplexTensor2>& half) {
  if (half.size() != grid.spectral_size()) throw ConfigError("expand_full_spectrum: size mismatch");
  const auto& d = grid.dims();
  std::vector<ComplexTensor2> full(grid.voxels());
  for (int k3 = 0; k3 < d[2]; ++k3) {
    for (int k2 = 0; k2 < d[1]; ++k2) {
      for (int k1 = 0; k1 < d[0]; ++k1) {
        const std::size_t idx =
            static_cast<std::size_t>(k1) + static_cast<std::size_t>(d[0]) * (k2 + d[1] * k3);
        if (k1 < grid.half_n1()) {
          full[idx] = half[grid.bin(k1, k2, k3)];
        } else {
          full[idx] = conj(half[grid.bin(d[0] - k1, (d[1] - k2) % d[1], (d[2] - k3) % d[2])]);
        }
      }
    }
  }
  return full;
}

KinematicHat greens_solve(const Tensor4& A0, const Tensor4& B0, const Vec3& xi,
                          const ComplexTensor2& tau, const ComplexTensor2& mu) {
  ComplexMat6 inv;
  if (!invert_frequency(generalized_stiffness(A0, B0), xi, inv)) {
    throw ConfigError("reference operator is singular at the requested wavevector");
  }
  std::array<Complex, 6> r;
  source(xi, tau, mu, r);
  KinematicHat out;
  std::array<Complex, 6> x{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) x[i] += inv[6 * i + j] * r[j];
  kinematics(xi, x, out.e, out.g);
  for (int i = 0; i < 3; ++i) {
    out.u[i] = x[i];
    out.phi[i] = x[3 + i];
  }
  return out;
}

GreensCache build_greens_cache(const Tensor4& A0, const Tensor4& B0, const FrequencyGrid& grid) {
  GreensCache cache;
  cache.grid = grid;
  cache.A0 = A0;
  cache.B0 = B0;
  const std::size_t nbins = grid.spectral_size();
  cache.inverse.assign(nbins, ComplexMat6{});
  cache.dual.assign(nbins, GreensCache::npos);
  std::size_t ndual = 0;
  for (std::size_t b = 1; b < nbins; ++b)
    if (grid.has_nyquist(b)) cache.dual[b] = ndual++;
  cache.dual_inverse.assign(ndual, ComplexMat6{});

  const Mat18 C = generalized_stiffness(A0, B0);
  std::vector<char> ok(nbins, 1);
  parallel_for(nbins, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = std::max<std::size_t>(begin, 1); b < end; ++b) {
      bool good = invert_frequency(C, grid.wavevector(b), cache.inverse[b]);
      if (good && cache.dual[b] != GreensCache::npos) {
        good = invert_frequency(C, grid.partner_wavevector(b), cache.dual_inverse[cache.dual[b]]);
      }
      ok[b] = good ? 1 : 0;
    }
  });
  for (std::size_t b = 1; b < nbins; ++b) {
    if (!ok[b]) {
      const auto k = grid.bin_indices(b);
      throw ConfigError("reference operator is singular at frequency (" + std::to_string(k[0]) +
                        "," + std::to_string(k[1]) + "," + std::to_string(k[2]) +
                        "); the reference medium is not admissible");
    }
  }
  return cache;
}

void apply_greens(const GreensCache& cache, const std::vector<ComplexTensor2>& tau_hat,
                  const std::vector<ComplexTensor2>& mu_hat, std::vector<ComplexTensor2>& e_hat,
                  std::vector<ComplexTensor2>& g_hat) {
  const FrequencyGrid& grid = cache.grid;
  const std::size_t nbins = grid.spectral_size();
  if (tau_hat.size() != nbins || mu_hat.size() != nbins) {
    throw ConfigError("apply_greens: spectrum size does not match the cache grid");
  }
  e_hat.resize(nbins);
  g_hat.resize(nbins);
  e_hat[0] = ComplexTensor2{};
  g_hat[0] = ComplexTensor2{};
  parallel_for(nbins, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = std::max<std::size_t>(begin, 1); b < end; ++b) {
      const Vec3 xi = grid.wavevector(b);
      solve_bin(cache.inverse[b], xi, tau_hat[b], mu_hat[b], e_hat[b], g_hat[b]);
      const std::size_t d = cache.dual[b];
      if (d == GreensCache::npos) continue;
      ComplexTensor2 e2, g2;
      solve_bin(cache.dual_inverse[d], grid.partner_wavevector(b), conj(tau_hat[b]),
                conj(mu_hat[b]), e2, g2);
      for (int i = 0; i < 9; ++i) {
        e_hat[b][i] = 0.5 * (e_hat[b][i] + std::conj(e2[i]));
        g_hat[b][i] = 0.5 * (g_hat[b][i] + std::conj(g2[i]));
      }
    }
  });
}

}  // namespace polarfft
