#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opcalc/logrep.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace opcalc;
using namespace opcalc::logrep;
using evolution::GeneratorFamily;

TEST_CASE("scalar A = 1 against closed forms") {
  const EvolutionFamily ev(GeneratorFamily::constant(Operator::scalar(1.0)));
  const Complex kappa = select_kappa(ev, TimeGrid::uniform(0.0, 1.0, 5));
  CHECK(std::abs(kappa - oracle_values::kKappaExpScalar) < 1e-12);
  CHECK(std::abs(alt_generator(ev, 1.0, 0.0, 1.0).a(0, 0) - oracle_values::kAltGenScalar) < 1e-12);
  CHECK(std::abs(dt_alt_generator(ev, 1.0, 0.0, 1.0)(0, 0) - oracle_values::kDtAltScalar) < 1e-12);
  CHECK(std::abs(dt_alt_generator(ev, 1.0, 0.0, 1.0, DerivativeMode::FiniteDifference)(0, 0) -
                 oracle_values::kDtAltScalar) < 1e-7);
  CHECK(std::abs(recover_generator_alt(ev, 1.0, 0.0, 1.0)(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(recover_generator_original(ev, 1.0, 0.0, 1.0)(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(nongroup_discrepancy(ev, 1.0, 0.0, 1.0) - oracle_values::kNongroupScalar) < 1e-12);
}

TEST_CASE("A = 0 leaves the maximal non-group discrepancy") {
  const EvolutionFamily ev(GeneratorFamily::constant(Operator::zero(2)));
  CHECK(std::abs(nongroup_discrepancy(ev, 1.0, 0.0, 1.0) - oracle_values::kNongroupIdentity) < 1e-12);
  CHECK(norm2(recover_generator_alt(ev, 0.7, 0.0, 1.0)) < 1e-13);
}

TEST_CASE("negative shift lands on the cut") {
  const EvolutionFamily ev(GeneratorFamily::constant(Operator::scalar(0.0)));
  try {
    alt_generator(ev, 1.0, 0.0, -2.0);
    FAIL("expected BranchCutViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BranchCutViolation);
    CHECK(std::string(e.what()).find("select_kappa") != std::string::npos);
  }
}

TEST_CASE("random commuting families recover A_1 both ways") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator b = testing_support::random_diagonalizable(
        rng, testing_support::random_spectrum(rng, 3, -1.0, 1.0, -2.0, 2.0));
    const EvolutionFamily ev(GeneratorFamily::commuting(expr::Expr::parse("1 + t^2/2"), b));
    CHECK(commutation_hypothesis_met(ev.generator()));
    const Complex kappa = select_kappa(ev, TimeGrid::uniform(0.0, 1.0, 6));
    const double t = 0.8;
    const Matrix a1 = ev.generator()(t).mat();
    CHECK(testing_support::rel_err(recover_generator_alt(ev, t, 0.2, kappa).mat(), a1) < 1e-9);
    CHECK(testing_support::rel_err(recover_generator_original(ev, t, 0.2, kappa).mat(), a1) < 1e-9);
    CHECK(testing_support::rel_err(
              recover_generator_alt(ev, t, 0.2, kappa, DerivativeMode::FiniteDifference).mat(), a1) < 1e-6);
    CHECK(consistency_residual(ev, t, 0.2, kappa) < 1e-9 * std::max(1.0, norm2(Operator(a1))));
    CHECK(dt_log_identity_check(ev, t, 0.2, kappa, Vector::Ones(3)) < 1e-6);
  }
}

TEST_CASE("general families are flagged and rejected by the identity check") {
  const auto gen = GeneratorFamily::general(2, [](double t) { return Operator::diagonal({t, 1.0}); });
  CHECK_FALSE(commutation_hypothesis_met(gen));
  const EvolutionFamily ev(gen);
  try {
    dt_log_identity_check(ev, 0.5, 0.0, 2.0, Vector::Ones(2));
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
}
