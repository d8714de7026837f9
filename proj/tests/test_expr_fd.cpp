#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opcalc/expr.hpp"
#include "opcalc/fd.hpp"

using namespace opcalc;
using expr::Expr;

TEST_CASE("expression parsing and evaluation") {
  CHECK(std::abs(Expr::parse("1 + 2*t^2")(3.0) - 19.0) < 1e-14);
  CHECK(std::abs(Expr::parse("-t^2")(2.0) + 4.0) < 1e-14);
  CHECK(std::abs(Expr::parse("exp(i*pi)")(0.0) + 1.0) < 1e-15);
  CHECK(std::abs(Expr::parse("sin(x) + cos(2*x)/2", "x")(0.0) - 0.5) < 1e-15);
  CHECK(std::abs(Expr::parse("log(e)")(0.0) - 1.0) < 1e-15);
  CHECK(Expr::parse("3*pi").is_constant());
  CHECK_FALSE(Expr::parse("t").is_constant());
}

TEST_CASE("parse errors carry the offset") {
  for (const char* bad : {"1 +", "sin(t", "t $ 2", "foo(t)", ""}) {
    try {
      Expr::parse(bad);
      FAIL("expected ParseError for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
    }
  }
  CHECK_THROWS_AS(Expr::parse("x + 1", "t"), Error);
}

TEST_CASE("symbolic derivatives") {
  const Expr f = Expr::parse("t^3 + sin(2*t) + exp(-t)");
  for (double t : {0.0, 0.7, 1.9}) {
    const double d1 = 3 * t * t + 2 * std::cos(2 * t) - std::exp(-t);
    const double d2 = 6 * t - 4 * std::sin(2 * t) + std::exp(-t);
    const double d4 = 16 * std::sin(2 * t) + std::exp(-t);
    CHECK(std::abs(f.derivative()(t) - d1) < 1e-12);
    CHECK(std::abs(f.derivative(2)(t) - d2) < 1e-12);
    CHECK(std::abs(f.derivative(4)(t) - d4) < 1e-12);
  }
  CHECK(std::abs(Expr::parse("log(t)").derivative()(4.0) - 0.25) < 1e-15);
  CHECK(std::abs(Expr::parse("t^t").derivative()(2.0) - 4.0 * (std::log(2.0) + 1.0)) < 1e-12);
}

TEST_CASE("Fornberg weights reproduce the classical central stencils") {
  const std::vector<double> offs{-2, -1, 0, 1, 2};
  const auto w1 = fd::fornberg_weights(1, offs);
  const std::vector<double> want1{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(w1[i] - want1[i]) < 1e-14);
  const auto w2 = fd::fornberg_weights(2, offs);
  const std::vector<double> want2{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(w2[i] - want2[i]) < 1e-13);
}

TEST_CASE("stencils stay inside the interval and near the evaluation point") {
  for (double t : {0.0, 0.013, 0.5, 0.995, 1.0}) {
    for (int order = 1; order <= 4; ++order) {
      const fd::Stencil st = fd::make_stencil(order, t, 0.01, 0.0, 1.0);
      for (std::size_t j = 0; j < st.offsets.size(); ++j) {
        CHECK(st.point(t, j) >= 0.0);
        CHECK(st.point(t, j) <= 1.0);
        CHECK(std::abs(st.offsets[j]) <= order + 4);
      }
    }
  }
  try {
    fd::make_stencil(2, 0.0, 0.1, 0.0, 0.3);
    FAIL("expected StencilOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StencilOutOfRange);
  }
}

TEST_CASE("stencils are fourth-order accurate") {
  const auto f = [](double t) { return Matrix::Constant(1, 1, std::sin(3.0 * t)); };
  for (double t : {0.0, 0.4, 1.0}) {
    const double exact[] = {3 * std::cos(3 * t), -9 * std::sin(3 * t), -27 * std::cos(3 * t), 81 * std::sin(3 * t)};
    for (int order = 1; order <= 4; ++order) {
      const double e1 = std::abs(fd::apply(fd::make_stencil(order, t, 0.02, 0.0, 1.0), t, f)(0, 0) - exact[order - 1]);
      const double e2 = std::abs(fd::apply(fd::make_stencil(order, t, 0.01, 0.0, 1.0), t, f)(0, 0) - exact[order - 1]);
      CHECK(e2 < 1e-5 * std::pow(3.0, order));
      if (e1 > 1e-9) CHECK(e1 / e2 > 10.0);
    }
  }
}
