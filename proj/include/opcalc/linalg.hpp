#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "opcalc/error.hpp"

namespace opcalc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A dense square complex matrix acting on C^d. Construction rejects
/// non-square, empty and non-finite input, so every Operator in circulation
/// is admissible for the public operations below.
class Operator {
 public:
  explicit Operator(Matrix m);

  static Operator identity(int dim);
  static Operator zero(int dim);
  static Operator diagonal(const std::vector<Complex>& diag);
  static Operator scalar(Complex value) { return diagonal({value}); }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

enum class AlgebraKind { Add, Sub, Mul };

Operator op_algebra(const Operator& a, const Operator& b, AlgebraKind kind);
Operator scale(const Operator& a, Complex factor);

inline Operator operator+(const Operator& a, const Operator& b) { return op_algebra(a, b, AlgebraKind::Add); }
inline Operator operator-(const Operator& a, const Operator& b) { return op_algebra(a, b, AlgebraKind::Sub); }
inline Operator operator*(const Operator& a, const Operator& b) { return op_algebra(a, b, AlgebraKind::Mul); }
inline Operator operator*(Complex c, const Operator& a) { return scale(a, c); }
inline Operator operator-(const Operator& a) { return scale(a, -1.0); }

Vector apply(const Operator& a, const Vector& x);

/// Tolerances shared by the dense primitives.
struct LinalgConfig {
  double cond_cap = 1e12;
  double inv_tol = 1e-13;
  double exp_tol = 1e-12;
  double eig_tol = 1e-9;
  /// SpectralProximity fires when dist(zeta, spectrum) < resolvent_margin * (1 + |zeta|).
  double resolvent_margin = 1e-8;
};

/// Spectral norm (largest singular value).
double norm2(const Operator& a);
double norm2(const Matrix& a);

/// Reciprocal-condition based estimate of the 1-norm condition number.
double condition_estimate(const Matrix& a);

Operator inverse(const Operator& m, const LinalgConfig& cfg = {});

/// exp(m) by scaling and squaring with a degree-13 Pade approximant.
Operator operator_exp(const Operator& m);
Matrix matrix_exp(const Matrix& m);

/// (zeta I - m)^{-1}; refuses zeta within the proximity margin of the spectrum.
Operator resolvent(const Operator& m, Complex zeta, const LinalgConfig& cfg = {});

struct SpectrumInfo {
  std::vector<Complex> eigenvalues;
  double spectral_radius = 0.0;
  bool diagonalizable_hint = true;
  /// Condition number of the computed eigenvector matrix.
  double eigvec_condition = 1.0;
};

SpectrumInfo spectrum(const Operator& m);
std::vector<Complex> eigenvalues(const Matrix& m);

}  // namespace opcalc
