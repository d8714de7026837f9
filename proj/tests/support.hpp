#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "opcalc/linalg.hpp"

namespace testing_support {

using opcalc::Complex;
using opcalc::Matrix;
using opcalc::Operator;

inline Matrix random_matrix(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(u(rng), u(rng));
  }
  return m;
}

inline std::vector<Complex> random_spectrum(std::mt19937_64& rng, int d, double re_lo, double re_hi, double im_lo,
                                            double im_hi) {
  std::uniform_real_distribution<double> re(re_lo, re_hi);
  std::uniform_real_distribution<double> im(im_lo, im_hi);
  std::vector<Complex> ev;
  for (int i = 0; i < d; ++i) ev.emplace_back(re(rng), im(rng));
  return ev;
}

inline Matrix diag(const std::vector<Complex>& ev) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(ev.size()), static_cast<Eigen::Index>(ev.size()));
  for (std::size_t i = 0; i < ev.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = ev[i];
  return m;
}

/// V diag(ev) V^{-1} with V = I + (0.3 / sqrt d) R, so V stays well conditioned.
inline Operator random_diagonalizable(std::mt19937_64& rng, const std::vector<Complex>& ev) {
  const int d = static_cast<int>(ev.size());
  const Matrix v = Matrix::Identity(d, d) + (0.3 / std::sqrt(static_cast<double>(d))) * random_matrix(rng, d);
  return Operator(v * diag(ev) * v.inverse());
}

/// Q diag(ev) Q^* with Q unitary.
inline Operator random_normal(std::mt19937_64& rng, const std::vector<Complex>& ev) {
  const int d = static_cast<int>(ev.size());
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(rng, d)).householderQ();
  return Operator(q * diag(ev) * q.adjoint());
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return opcalc::norm2(Matrix(got - want)) / std::max(opcalc::norm2(want), 1e-300);
}

template <int N>
Matrix from_array(const std::complex<double> (&a)[N][N]) {
  Matrix m(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) m(i, j) = a[i][j];
  }
  return m;
}

}  // namespace testing_support
