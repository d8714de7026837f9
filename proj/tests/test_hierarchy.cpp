#include <cmath>

#include "doctest.h"
#include "opcalc/hierarchy.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace opcalc;
using namespace opcalc::hierarchy;
using testing_support::rel_err;

TEST_CASE("scalar profile f(t) = t gives 1 + t^2 and 3t + t^3") {
  const auto gen = GeneratorFamily::commuting(expr::Expr::parse("t"), Operator::identity(1), 2.0);
  const OperatorFamilySeq seq = recurrence_build(gen, 3);
  for (double t : {0.0, 0.5, 1.3}) {
    CHECK(std::abs(seq.member(2, t)(0, 0) - (1.0 + t * t)) < 1e-13);
    CHECK(std::abs(seq.member(3, t)(0, 0) - (3.0 * t + t * t * t)) < 1e-13);
    CHECK(std::abs(miura_second_order(gen, t)(0, 0) - (1.0 + t * t)) < 1e-13);
  }
}

TEST_CASE("constant generator gives exact powers") {
  const Operator a = Operator::diagonal({2.0, Complex(0.0, 1.0)});
  const OperatorFamilySeq seq = recurrence_build(GeneratorFamily::constant(a), 6);
  const auto all = seq.members(0.3);
  REQUIRE(all.size() == 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(all[static_cast<std::size_t>(k - 1)](0, 0) == Complex(std::pow(2.0, k)));
    CHECK(std::abs(all[static_cast<std::size_t>(k - 1)](1, 1) - std::pow(Complex(0.0, 1.0), k)) < 1e-15);
  }
}

TEST_CASE("order cap for finite-difference generators") {
  const auto gen = GeneratorFamily::general(1, [](double t) { return Operator::scalar(t); });
  CHECK_NOTHROW(recurrence_build(gen, kFdOrderCap));
  try {
    recurrence_build(gen, kFdOrderCap + 1);
    FAIL("expected OrderCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OrderCapExceeded);
  }
}

TEST_CASE("order-n equations hold along trajectories and a fault is caught") {
  std::mt19937_64 rng(8);
  const Operator b = testing_support::random_normal(rng, testing_support::random_spectrum(rng, 3, -1.0, 1.0, -1.0, 1.0));
  const auto gen = GeneratorFamily::commuting(expr::Expr::parse("cos(t)"), b);
  const EvolutionFamily ev(gen);
  OperatorFamilySeq seq = recurrence_build(gen, 4);
  const auto grid = TimeGrid::uniform(0.0, 1.0, 6);
  const HierarchyReport clean = verify_nth_order(seq, ev, grid, Vector::Ones(3));
  CHECK(clean.max_residual() < 1e-8);
  CHECK(clean.commutation_met);
  seq.inject_fault(2, Operator::identity(3));
  const HierarchyReport faulty = verify_nth_order(seq, ev, grid, Vector::Ones(3));
  CHECK(faulty.max_residual(1) < 1e-8);
  CHECK(faulty.max_residual(2) > 0.5);
}

TEST_CASE("four representations agree for a constant generator") {
  std::mt19937_64 rng(9);
  const Operator a = testing_support::random_normal(rng, testing_support::random_spectrum(rng, 3, 1.0, 2.0, -0.5, 0.5));
  const EvolutionFamily ev(GeneratorFamily::constant(a));
  const int n = 3;
  const double t = 0.7;
  const Complex kappa = select_product_kappa(ev, n, TimeGrid::uniform(0.0, 1.0, 5));
  const Matrix rec = recurrence_build(ev.generator(), n).member(n, t).mat();
  CHECK(rel_err(factorize_product(ev, n, t, 0.0).mat(), rec) < 1e-10);
  CHECK(rel_err(log_product_representation(ev, n, t, 0.0, kappa).mat(), rec) < 1e-9);
  CHECK(rel_err(alt_log_product(ev, n, t, 0.0, kappa).mat(), rec) < 1e-9);
  CHECK(ordering_sensitivity(ev, n, t, 0.0) < 1e-9 * norm2(Operator(rec)));
  CHECK(factor_form_discrepancy(ev, 2, t, 0.0) < 1e-10 * norm2(a));
}

TEST_CASE("nilpotent generator has a singular derivative") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  const EvolutionFamily ev(GeneratorFamily::constant(Operator(a)));
  try {
    factorize_product(ev, 2, 1.0, 0.0);
    FAIL("expected SingularDerivative");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingularDerivative);
    CHECK(e.value() == 2.0);
  }
}

TEST_CASE("fractional generator") {
  CHECK(std::abs(hille_yosida_gen(Operator::scalar(4.0), 2, 1.0)(0, 0) - oracle_values::kHyGenScalar) < 1e-12);
  const RootCheck inside = fractional_power_roundtrip(Operator::diagonal({1.0, Complex(2.0, 0.5)}), 3);
  CHECK(inside.in_sector);
  CHECK(inside.roundtrip_error < 1e-10);
  CHECK(inside.power_residual < 1e-10);
  const RootCheck outside = fractional_power_roundtrip(Operator::diagonal({Complex(-1.0, 0.5), 2.0}), 2);
  CHECK_FALSE(outside.in_sector);
  CHECK(outside.roundtrip_error > 1.0);
  CHECK(outside.power_residual < 1e-10);
}
