#include <cmath>

#include "doctest.h"
#include "opcalc/evolution.hpp"
#include "support.hpp"

using namespace opcalc;
using namespace opcalc::evolution;
using testing_support::rel_err;

namespace {

Operator jordan2(double lambda) {
  Matrix j = Matrix::Zero(2, 2);
  j(0, 0) = lambda;
  j(1, 1) = lambda;
  j(0, 1) = 1.0;
  return Operator(j);
}

}  // namespace

TEST_CASE("constant generator uses the matrix exponential") {
  const Operator a = Operator::diagonal({1.0, Complex(0.0, 2.0)});
  const EvolutionFamily ev(GeneratorFamily::constant(a, 2.0));
  CHECK(ev.method() == Method::MatrixExp);
  const Operator u = ev.propagate(1.5, 0.5);
  CHECK(std::abs(u(0, 0) - std::exp(1.0)) < 1e-13);
  CHECK(std::abs(u(1, 1) - std::exp(Complex(0.0, 2.0))) < 1e-13);
  CHECK(std::abs(ev.dt(1.5, 0.5, 3)(0, 0) - std::exp(1.0)) < 1e-12);
  CHECK(std::abs(ev.dt(1.5, 0.5, 2)(1, 1) + 4.0 * std::exp(Complex(0.0, 2.0))) < 1e-12);
}

TEST_CASE("commuting generator integrates the profile") {
  // A(t) = t B: U(t, s) = exp((t^2 - s^2) / 2 B).
  const Operator b = Operator::diagonal({1.0, -0.5});
  const EvolutionFamily ev(GeneratorFamily::commuting(expr::Expr::parse("t"), b, 2.0));
  CHECK(ev.method() == Method::ExpOfIntegral);
  const double t = 1.7;
  const double s = 0.3;
  const double w = (t * t - s * s) / 2.0;
  CHECK(std::abs(ev.propagate(t, s)(0, 0) - std::exp(w)) < 1e-12);
  CHECK(std::abs(ev.propagate(t, s)(1, 1) - std::exp(-0.5 * w)) < 1e-12);
  // d/dt U = t B U, d2/dt2 U = (B + t^2 B^2) U.
  CHECK(std::abs(ev.dt(t, s, 1)(0, 0) - t * std::exp(w)) < 1e-10);
  CHECK(std::abs(ev.dt(t, s, 2)(0, 0) - (1.0 + t * t) * std::exp(w)) < 1e-9);
}

TEST_CASE("semigroup property for every structure") {
  std::mt19937_64 rng(3);
  const Operator a(0.5 * testing_support::random_matrix(rng, 4));
  const Operator b(0.5 * testing_support::random_matrix(rng, 4));
  const EvolutionFamily c(GeneratorFamily::constant(a));
  const EvolutionFamily k(GeneratorFamily::commuting(expr::Expr::parse("1 + sin(t)"), a));
  const EvolutionFamily g(GeneratorFamily::general(4, [&](double t) { return a + Complex(t) * b; }));
  CHECK(g.method() == Method::ODEIntegrate);
  CHECK(check_semigroup(c, 0.1, 0.4, 0.9) < 1e-12);
  CHECK(check_semigroup(k, 0.1, 0.4, 0.9) < 1e-11);
  CHECK(check_semigroup(g, 0.1, 0.4, 0.9) < 1e-8);
  CHECK(norm2(g.propagate(0.6, 0.6) - Operator::identity(4)) == 0.0);
}

TEST_CASE("general family agrees with the exponential for a constant evaluator") {
  std::mt19937_64 rng(4);
  const Operator a(testing_support::random_matrix(rng, 3));
  const EvolutionFamily exact(GeneratorFamily::constant(a));
  const EvolutionFamily ode(GeneratorFamily::general(3, [&](double) { return a; }));
  CHECK(rel_err(ode.propagate(1.0, 0.0).mat(), exact.propagate(1.0, 0.0).mat()) < 1e-9);
  CHECK(rel_err(ode.dt(0.8, 0.1, 2).mat(), exact.dt(0.8, 0.1, 2).mat()) < 1e-6);
}

TEST_CASE("horizon and order limits") {
  const EvolutionFamily ev(GeneratorFamily::constant(Operator::identity(2), 1.0));
  for (auto [t, s] : {std::pair{1.5, 0.0}, std::pair{0.5, -0.1}}) {
    try {
      ev.propagate(t, s);
      FAIL("expected HorizonViolation");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::HorizonViolation);
    }
  }
  const EvolutionFamily g(GeneratorFamily::general(2, [](double t) { return Operator::diagonal({t, 1.0}); }));
  try {
    g.dt(0.5, 0.0, 5);
    FAIL("expected OrderCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OrderCapExceeded);
  }
  CHECK_THROWS_AS(TimeGrid({0.0, 0.0}), Error);
  CHECK_THROWS_AS(GeneratorFamily::constant(Operator::identity(1), 0.0), Error);
}

TEST_CASE("overflow guard stops blow-up") {
  EvolutionConfig cfg;
  cfg.overflow_guard = 1e3;
  const EvolutionFamily ev(GeneratorFamily::general(1, [](double) { return Operator::scalar(20.0); }), cfg);
  try {
    ev.propagate(1.0, 0.0);
    FAIL("expected IntegrationBlowup");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IntegrationBlowup);
  }
}

TEST_CASE("finite-difference generator derivatives") {
  const auto gen = GeneratorFamily::general(1, [](double t) { return Operator::scalar(std::sin(2.0 * t)); });
  CHECK_FALSE(gen.has_analytic_derivatives());
  for (double t : {0.0, 0.5, 1.0}) {
    CHECK(std::abs(gen.derivative(t, 1)(0, 0) - 2.0 * std::cos(2.0 * t)) < 1e-6);
    CHECK(std::abs(gen.derivative(t, 2)(0, 0) + 4.0 * std::sin(2.0 * t)) < 1e-5);
  }
}

TEST_CASE("growth bound for a Jordan block needs M > 1") {
  EvolutionFamily ev(GeneratorFamily::constant(jordan2(-1.0), 4.0));
  const GrowthBound g = fit_growth_bound(ev, TimeGrid::uniform(0.0, 4.0, 9));
  CHECK(std::abs(g.omega + 1.0) < 1e-8);
  CHECK(g.m > 1.0);
  REQUIRE(ev.growth().has_value());
  for (double t : {0.5, 1.0, 2.0, 4.0}) CHECK(norm2(ev.propagate(t, 0.0)) <= g.m * std::exp(g.omega * t) * (1 + 1e-12));
}

TEST_CASE("resolvent estimate for dissipative and Jordan generators") {
  const std::vector<Complex> lambdas{0.1, 1.0, 10.0, Complex(1.0, 5.0), 100.0};
  const auto diss = resolvent_estimate_check(
      GeneratorFamily::constant(Operator::diagonal({-1.0, Complex(-0.5, 3.0)})), 0.0, 1.0, lambdas);
  CHECK(diss.passed);
  CHECK(diss.fitted_c <= diss.growth_constant * (1 + 1e-9));
  const auto jor = resolvent_estimate_check(GeneratorFamily::constant(jordan2(-0.2)), 0.0, 1.0, lambdas);
  CHECK(jor.passed);
  CHECK(jor.growth_constant > 1.0);
  CHECK_THROWS_AS(resolvent_estimate_check(GeneratorFamily::constant(jordan2(-1.0)), 0.0, 1.0,
                                           std::vector<Complex>{-1.0}),
                  Error);
}
