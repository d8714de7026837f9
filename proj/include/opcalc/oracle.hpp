#pragma once

#include "opcalc/linalg.hpp"

namespace opcalc::oracle {

/// Scalar functions the eigendecomposition oracle knows how to lift.
struct ScalarFunction {
  enum class Kind { Log, Sqrt, Root, Exp } kind;
  int n = 1;

  static ScalarFunction log() { return {Kind::Log, 1}; }
  static ScalarFunction sqrt() { return {Kind::Sqrt, 2}; }
  static ScalarFunction root(int n) { return {Kind::Root, n}; }
  static ScalarFunction exp() { return {Kind::Exp, 1}; }
};

/// V diag(f(lambda_i)) V^{-1}. Kept out of the main library: this is the
/// independent reference that contour quadrature is checked against.
/// Throws DefectiveMatrix when cond(V) exceeds `eigvec_cap`, DomainViolation
/// when f has a branch point or cut at some eigenvalue.
Operator eigen_oracle(ScalarFunction f, const Operator& m, double eigvec_cap = 1e10);

}  // namespace opcalc::oracle
