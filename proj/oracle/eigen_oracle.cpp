#include "opcalc/oracle.hpp"

#include <cmath>
#include <numbers>

namespace opcalc::oracle {

namespace {

bool on_branch_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

Complex evaluate(ScalarFunction f, Complex z) {
  switch (f.kind) {
    case ScalarFunction::Kind::Exp: return std::exp(z);
    case ScalarFunction::Kind::Log: return std::log(z);
    case ScalarFunction::Kind::Sqrt: return std::sqrt(z);
    case ScalarFunction::Kind::Root: return std::exp(std::log(z) / static_cast<double>(f.n));
  }
  return z;
}

}  // namespace

Operator eigen_oracle(ScalarFunction f, const Operator& m, double eigvec_cap) {
  Eigen::ComplexEigenSolver<Matrix> solver(m.mat(), true);
  if (solver.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "oracle eigensolver failed");
  const Matrix& v = solver.eigenvectors();
  const double cond = condition_estimate(v);
  if (!(cond <= eigvec_cap)) throw Error(Errc::DefectiveMatrix, "eigenvector matrix is ill-conditioned", cond);

  Vector fvals(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const Complex lambda = solver.eigenvalues()(i);
    if (f.kind != ScalarFunction::Kind::Exp && on_branch_cut(lambda)) {
      throw Error(Errc::DomainViolation, "eigenvalue on the branch cut (-inf, 0]", 0.0, lambda);
    }
    fvals(i) = evaluate(f, lambda);
  }
  const Matrix result = v * fvals.asDiagonal() * v.partialPivLu().inverse();
  return Operator(result);
}

}  // namespace opcalc::oracle
