#include "dense_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polarfft::testing {

namespace {

using Mat6c = Eigen::Matrix<Complex, 6, 6>;
using Vec6c = Eigen::Matrix<Complex, 6, 1>;
using Mat18x6c = Eigen::Matrix<Complex, 18, 6>;
using Vec18c = Eigen::Matrix<Complex, 18, 1>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

constexpr Complex kI{0.0, 1.0};

int signed_freq(int k, int n) { return 2 * k < n ? k : k - n; }

// (u, phi) -> (e, g) with e_kl = u_l,k + eps_lkm phi_m and g_kl = phi_k,l.
Mat18x6c gradient(const std::array<double, 3>& xi) {
  Mat18x6c D = Mat18x6c::Zero();
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      D(3 * k + l, l) = kI * xi[k];
      for (int m = 0; m < 3; ++m) {
        const int eps = (l - k) * (k - m) * (m - l) / 2;
        D(3 * k + l, 3 + m) += static_cast<double>(eps);
      }
      D(9 + 3 * k + l, 3 + k) = kI * xi[l];
    }
  }
  return D;
}

// Generalized stiffness on (e, g) producing (t, m^T).
Mat18 stiffness_matrix(const Stiffness& s) {
  Mat18 C = Mat18::Zero();
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      C(r, c) = s.A.c[9 * r + c];
      C(9 + r, 9 + c) = s.B.c[9 * r + c];
    }
  return C;
}

}  // namespace

std::vector<std::array<Complex, 9>> naive_dft(const std::array<int, 3>& dims,
                                              const std::vector<Tensor2>& field) {
  const int n1 = dims[0], n2 = dims[1], n3 = dims[2];
  const std::size_t M = static_cast<std::size_t>(n1) * n2 * n3;
  std::vector<std::array<Complex, 9>> out(M);
  for (int a = 0; a < n3; ++a)
    for (int b = 0; b < n2; ++b)
      for (int c = 0; c < n1; ++c) {
        std::array<Complex, 9> acc{};
        for (int z = 0; z < n3; ++z)
          for (int y = 0; y < n2; ++y)
            for (int x = 0; x < n1; ++x) {
              const double phase = -2.0 * std::numbers::pi *
                                   (double(c) * x / n1 + double(b) * y / n2 + double(a) * z / n3);
              const Complex w = std::polar(1.0, phase);
              const Tensor2& f = field[x + n1 * (y + n2 * z)];
              for (int i = 0; i < 9; ++i) acc[i] += w * f.v[i];
            }
        out[c + n1 * (b + n2 * a)] = acc;
      }
  return out;
}

DenseFields dense_elastic_solve(const VoxelGrid& grid, const MaterialTable& materials,
                                const Tensor2& E, const Tensor2& Gamma) {
  const auto dims = grid.dims;
  const std::size_t M = grid.voxels();
  const int n = static_cast<int>(18 * M);

  std::vector<Mat18> C(M);
  Mat18 C0 = Mat18::Zero();
  for (std::size_t x = 0; x < M; ++x) {
    C[x] = stiffness_matrix(assemble_stiffness(materials[grid.phase[x]]));
    C0 += C[x] / static_cast<double>(M);
  }

  // Per-frequency reference operators on the full spectrum.
  std::vector<Mat18x6c> D(M);
  std::vector<Mat6c> Kinv(M);
  for (int a = 0; a < dims[2]; ++a)
    for (int b = 0; b < dims[1]; ++b)
      for (int c = 0; c < dims[0]; ++c) {
        const std::size_t bin = c + dims[0] * (b + dims[1] * a);
        if (bin == 0) continue;
        const std::array<double, 3> xi{
            2.0 * std::numbers::pi * signed_freq(c, dims[0]) / grid.lengths[0],
            2.0 * std::numbers::pi * signed_freq(b, dims[1]) / grid.lengths[1],
            2.0 * std::numbers::pi * signed_freq(a, dims[2]) / grid.lengths[2]};
        D[bin] = gradient(xi);
        const Mat6c K = D[bin].adjoint() * C0.cast<Complex>() * D[bin];
        Eigen::FullPivLU<Mat6c> lu(K);
        if (!lu.isInvertible()) throw std::runtime_error("dense oracle: singular frequency");
        Kinv[bin] = lu.inverse();
      }

  // Column j of the fluctuation operator y -> K (C - C0) y.
  auto apply = [&](const Eigen::VectorXd& y) {
    std::vector<Tensor2> te(M), tg(M);
    for (std::size_t x = 0; x < M; ++x) {
      Eigen::Matrix<double, 18, 1> s = (C[x] - C0) * y.segment<18>(18 * x);
      for (int i = 0; i < 9; ++i) {
        te[x].v[i] = s(i);
        tg[x].v[i] = s(9 + i);
      }
    }
    const auto th = naive_dft(dims, te);
    const auto gh = naive_dft(dims, tg);
    std::vector<Vec18c> eh(M, Vec18c::Zero());
    for (std::size_t bin = 1; bin < M; ++bin) {
      Vec18c s;
      for (int i = 0; i < 9; ++i) {
        s(i) = th[bin][i];
        s(9 + i) = gh[bin][i];
      }
      const Vec6c u = -Kinv[bin] * (D[bin].adjoint() * s);
      eh[bin] = D[bin] * u;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int z = 0; z < dims[2]; ++z)
      for (int yy = 0; yy < dims[1]; ++yy)
        for (int x = 0; x < dims[0]; ++x) {
          const std::size_t v = x + dims[0] * (yy + dims[1] * z);
          Vec18c acc = Vec18c::Zero();
          for (int a = 0; a < dims[2]; ++a)
            for (int b = 0; b < dims[1]; ++b)
              for (int c = 0; c < dims[0]; ++c) {
                const std::size_t bin = c + dims[0] * (b + dims[1] * a);
                const double phase =
                    2.0 * std::numbers::pi *
                    (double(c) * x / dims[0] + double(b) * yy / dims[1] + double(a) * z / dims[2]);
                acc += std::polar(1.0, phase) * eh[bin];
              }
          out.segment<18>(18 * v) = acc.real() / static_cast<double>(M);
        }
    return out;
  };

  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    unit(j) = 1.0;
    L.col(j) -= apply(unit);
  }
  Eigen::VectorXd rhs(n);
  for (std::size_t x = 0; x < M; ++x)
    for (int i = 0; i < 9; ++i) {
      rhs(18 * x + i) = E.v[i];
      rhs(18 * x + 9 + i) = Gamma.v[i];
    }
  const Eigen::VectorXd y = L.partialPivLu().solve(rhs);

  DenseFields out;
  out.e.resize(M);
  out.g.resize(M);
  for (std::size_t x = 0; x < M; ++x)
    for (int i = 0; i < 9; ++i) {
      out.e[x].v[i] = y(18 * x + i);
      out.g[x].v[i] = y(18 * x + 9 + i);
    }
  return out;
}

}  // namespace polarfft::testing
