#include "opcalc/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace opcalc {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularOperator: return "SingularOperator";
    case Errc::SpectralProximity: return "SpectralProximity";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::DefectiveMatrix: return "DefectiveMatrix";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::BranchCutViolation: return "BranchCutViolation";
    case Errc::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case Errc::HorizonViolation: return "HorizonViolation";
    case Errc::IntegrationBlowup: return "IntegrationBlowup";
    case Errc::StencilOutOfRange: return "StencilOutOfRange";
    case Errc::DerivativeNoise: return "DerivativeNoise";
    case Errc::SingularDerivative: return "SingularDerivative";
    case Errc::OrderCapExceeded: return "OrderCapExceeded";
    case Errc::ZeroModeDivision: return "ZeroModeDivision";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownCase: return "UnknownCase";
  }
  return "Unknown";
}

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw Error(Errc::InvalidArgument,
                "operator must be square with dim >= 1, got " + std::to_string(m_.rows()) + "x" +
                    std::to_string(m_.cols()));
  }
  if (!m_.allFinite()) throw Error(Errc::InvalidArgument, "operator has non-finite entries");
}

Operator Operator::identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }
Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator Operator::diagonal(const std::vector<Complex>& diag) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return Operator(std::move(m));
}

Operator op_algebra(const Operator& a, const Operator& b, AlgebraKind kind) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch,
                "dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  switch (kind) {
    case AlgebraKind::Add: return Operator(a.mat() + b.mat());
    case AlgebraKind::Sub: return Operator(a.mat() - b.mat());
    case AlgebraKind::Mul: return Operator(a.mat() * b.mat());
  }
  throw Error(Errc::InvalidArgument, "unknown algebra kind");
}

Operator scale(const Operator& a, Complex factor) { return Operator(factor * a.mat()); }

Vector apply(const Operator& a, const Vector& x) {
  if (x.size() != a.dim()) throw Error(Errc::DimensionMismatch, "vector length does not match operator dim");
  return a.mat() * x;
}

double norm2(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double norm2(const Operator& a) { return norm2(a.mat()); }

double condition_estimate(const Matrix& a) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / rcond;
}

Operator inverse(const Operator& m, const LinalgConfig& cfg) {
  Eigen::PartialPivLU<Matrix> lu(m.mat());
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= cfg.cond_cap)) {
    throw Error(Errc::SingularOperator, "condition estimate " + std::to_string(cond) + " above cap", cond);
  }
  Matrix inv = lu.inverse();
  if (!inv.allFinite()) throw Error(Errc::SingularOperator, "inverse overflowed", cond);
  return Operator(std::move(inv));
}

namespace {

// Higham (2005) degree-13 scaling-and-squaring constants.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

Matrix pade_low(const Matrix& a, int degree) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                                30270240.0,    2162160.0,    110880.0,     3960.0,
                                                90.0,          1.0};
  const double* b = degree == 3 ? b3.data() : degree == 5 ? b5.data() : degree == 7 ? b7.data() : b9.data();
  const Matrix a2 = a * a;
  Matrix power = id;
  Matrix u_even = b[1] * id;
  Matrix v = b[0] * id;
  for (int k = 2; k <= degree; k += 2) {
    power = power * a2;
    u_even += b[k + 1] * power;
    v += b[k] * power;
  }
  const Matrix u = a * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix matrix_exp(const Matrix& m) {
  const auto n = m.rows();
  const double nrm = norm1(m);
  if (nrm == 0.0) return Matrix::Identity(n, n);
  static constexpr std::array<std::pair<int, double>, 4> low = {
      {{3, 1.495585217958292e-2}, {5, 2.539398330063230e-1}, {7, 9.504178996162932e-1}, {9, 2.097847961257068}}};
  for (const auto& [degree, theta] : low) {
    if (nrm <= theta) return pade_low(m, degree);
  }
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
  const Matrix a = m / std::ldexp(1.0, squarings);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kPade13;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Operator operator_exp(const Operator& m) { return Operator(matrix_exp(m.mat())); }

std::vector<Complex> eigenvalues(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Operator resolvent(const Operator& m, Complex zeta, const LinalgConfig& cfg) {
  const auto ev = eigenvalues(m.mat());
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& lambda : ev) dist = std::min(dist, std::abs(zeta - lambda));
  const double margin = cfg.resolvent_margin * (1.0 + std::abs(zeta));
  if (dist < margin) {
    throw Error(Errc::SpectralProximity, "zeta within " + std::to_string(dist) + " of the spectrum", dist, zeta);
  }
  const Matrix shifted = zeta * Matrix::Identity(m.dim(), m.dim()) - m.mat();
  return Operator(shifted.partialPivLu().inverse());
}

SpectrumInfo spectrum(const Operator& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m.mat(), true);
  if (solver.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "eigenvalue iteration did not converge");
  SpectrumInfo info;
  const auto& ev = solver.eigenvalues();
  info.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  for (const auto& lambda : info.eigenvalues) info.spectral_radius = std::max(info.spectral_radius, std::abs(lambda));
  Eigen::JacobiSVD<Matrix> svd(solver.eigenvectors());
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  info.eigvec_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  info.diagonalizable_hint = info.eigvec_condition < 1e8;
  return info;
}

}  // namespace opcalc
