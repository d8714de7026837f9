#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opcalc/functional_calculus.hpp"
#include "opcalc/oracle.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace opcalc;
using testing_support::from_array;
using testing_support::rel_err;

TEST_CASE("scalar closed forms") {
  CHECK(norm2(calc::principal_log(Operator::identity(3))) < 1e-14);
  const Operator l2 = calc::principal_log(Operator::diagonal({2.0, 2.0}));
  CHECK(std::abs(l2(0, 0) - oracle_values::kLog2) < 1e-13);
  CHECK(std::abs(l2(0, 1)) < 1e-14);
  CHECK(std::abs(calc::principal_root(Operator::scalar(4.0), 2)(0, 0) - 2.0) < 1e-13);
  CHECK(std::abs(calc::principal_root(Operator::scalar(Complex(0.0, 8.0)), 3)(0, 0) -
                 std::exp(std::log(Complex(0.0, 8.0)) / 3.0)) < 1e-13);
}

TEST_CASE("non-normal matrix against frozen Schur-based references") {
  const Operator m(from_array(oracle_values::kM1));
  CHECK(rel_err(calc::principal_log(m).mat(), from_array(oracle_values::kLogM1)) < 1e-10);
  CHECK(rel_err(calc::principal_root(m, 2).mat(), from_array(oracle_values::kSqrtM1)) < 1e-10);
  CHECK(rel_err(calc::principal_root(m, 3).mat(), from_array(oracle_values::kCbrtM1)) < 1e-10);
}

TEST_CASE("exp(Log M) = M and (M^{1/n})^n = M") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator m = testing_support::random_diagonalizable(
        rng, testing_support::random_spectrum(rng, 5, 0.5, 4.0, -2.0, 2.0));
    CHECK(rel_err(operator_exp(calc::principal_log(m)).mat(), m.mat()) < 1e-10);
    const Matrix r = calc::principal_root(m, 3).mat();
    CHECK(rel_err(r * r * r, m.mat()) < 1e-10);
  }
}

TEST_CASE("branch-cut violation carries the offending eigenvalue and a shift hint") {
  const Operator m = Operator::diagonal({-2.0, 1.0});
  try {
    calc::principal_log(m);
    FAIL("expected BranchCutViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BranchCutViolation);
    REQUIRE(e.point().has_value());
    CHECK(std::abs(*e.point() - Complex(-2.0)) < 1e-12);
    CHECK(e.value() > 2.0);
  }
}

TEST_CASE("centroid circle for a compact spectrum") {
  const calc::Contour c = calc::build_contour(Operator::diagonal({2.0, 3.0}));
  CHECK(std::abs(c.center - Complex(2.5)) < 1e-15);
  CHECK(std::abs(c.radius - 0.6) < 1e-15);
  CHECK(calc::build_contours(Operator::diagonal({2.0, 3.0})).size() == 1);
}

TEST_CASE("spectra no single circle can hold are split across circles") {
  // The disk through a conjugate pair left of the origin always meets the cut.
  const std::vector<Complex> pair{Complex(-1.0, 2.0), Complex(-1.0, -2.0)};
  CHECK_THROWS_AS(calc::build_contour(Operator::diagonal(pair)), Error);
  CHECK(calc::build_contours(Operator::diagonal(pair)).size() == 2);
  const Operator l = calc::principal_log(Operator::diagonal(pair));
  for (int i = 0; i < 2; ++i) CHECK(std::abs(l(i, i) - std::log(pair[static_cast<std::size_t>(i)])) < 1e-11);

  const std::vector<Complex> wide{1.0, 50.0, Complex(-20.0, 3.0)};
  std::mt19937_64 rng(2);
  const Operator m = testing_support::random_diagonalizable(rng, wide);
  CHECK(rel_err(calc::principal_log(m).mat(), oracle::eigen_oracle(oracle::ScalarFunction::log(), m).mat()) < 1e-10);
  CHECK(rel_err(calc::principal_root(m, 3).mat(), oracle::eigen_oracle(oracle::ScalarFunction::root(3), m).mat()) <
        1e-10);
}

TEST_CASE("coincident eigenvalues stay on one circle") {
  Matrix j = Matrix::Zero(3, 3);
  j(0, 0) = j(1, 1) = 1.0;
  j(0, 1) = 1.0;
  j(2, 2) = Complex(-3.0, 0.5);
  const auto circles = calc::build_contours(Operator(j));
  CHECK(circles.size() == 2);
  const Matrix l = calc::principal_log(Operator(j)).mat();
  CHECK(rel_err(matrix_exp(l), j) < 1e-10);
  CHECK(std::abs(l(0, 1) - 1.0) < 1e-10);
}

TEST_CASE("centroid circle crossing the cut falls back to a shifted circle") {
  const std::vector<Complex> ev{Complex(0.3, 0.3), Complex(0.3, -0.3), 4.0};
  const calc::Contour c = calc::build_contour(Operator::diagonal(ev));
  CHECK(c.center.real() - c.radius > 0.0);
  for (const auto& lambda : ev) CHECK(std::abs(lambda - c.center) < c.radius);
  const Operator l = calc::principal_log(Operator::diagonal(ev));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(l(i, i) - std::log(ev[static_cast<std::size_t>(i)])) < 1e-10);
}

TEST_CASE("quadrature reports nonconvergence when the node budget is exhausted") {
  calc::CalcConfig cfg;
  cfg.initial_nodes = 64;
  cfg.max_nodes = 64;
  try {
    calc::principal_log(Operator::diagonal({1.0, 3.0}), cfg);
    FAIL("expected QuadratureNonconvergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::QuadratureNonconvergence);
  }
}

TEST_CASE("serial and parallel node sums are bitwise identical") {
  std::mt19937_64 rng(5);
  const Operator m = testing_support::random_diagonalizable(
      rng, testing_support::random_spectrum(rng, 8, 1.0, 3.0, -1.0, 1.0));
  calc::Contour c = calc::build_contour(m);
  c.nodes = 512;
  const Matrix par = calc::trapezoid(calc::HoloFunction::log(), m.mat(), c, false);
  const Matrix ser = calc::trapezoid(calc::HoloFunction::log(), m.mat(), c, true);
  CHECK((par - ser).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("principal sector test") {
  CHECK(calc::in_principal_sector(Operator::diagonal({1.0, Complex(1.0, 0.9)}), 2));
  CHECK_FALSE(calc::in_principal_sector(Operator::diagonal({1.0, Complex(1.0, 1.1)}), 4));
  CHECK_FALSE(calc::in_principal_sector(Operator::diagonal({-1.0}), 1));
}

TEST_CASE("eigendecomposition oracle guards its own domain") {
  try {
    oracle::eigen_oracle(oracle::ScalarFunction::log(), Operator::diagonal({-1.0, 2.0}));
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DomainViolation);
  }
  Matrix j = Matrix::Identity(2, 2);
  j(0, 1) = 1.0;
  try {
    oracle::eigen_oracle(oracle::ScalarFunction::log(), Operator(j));
    FAIL("expected DefectiveMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DefectiveMatrix);
  }
  const Operator m(from_array(oracle_values::kM1));
  CHECK(rel_err(oracle::eigen_oracle(oracle::ScalarFunction::exp(), m).mat(), from_array(oracle_values::kExpM1)) <
        1e-12);
}
