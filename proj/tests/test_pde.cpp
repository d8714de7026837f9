#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opcalc/spectral_pde.hpp"
#include "oracle_values.hpp"

using namespace opcalc;
using namespace opcalc::pde;

namespace {

PDEScenario scenario(int k, int order, const std::string& initial, double horizon = 1.0) {
  PDEScenario sc;
  sc.grid = PeriodicGrid(32, 2.0 * std::numbers::pi);
  sc.k = k;
  sc.order = order;
  sc.initial = sample_initial(sc.grid, initial);
  sc.horizon = horizon;
  sc.timesteps = 4;
  return sc;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(PeriodicGrid(6, 1.0), Error);
  CHECK_THROWS_AS(PeriodicGrid(9, 1.0), Error);
  CHECK_THROWS_AS(PeriodicGrid(8, -1.0), Error);
}

TEST_CASE("spectral differentiation is exact on resolved modes") {
  const PeriodicGrid grid(16, 2.0 * std::numbers::pi);
  const Operator d1 = fourier_diff_matrix(grid, 1);
  const Vector u = sample_initial(grid, "sin(3*x)");
  const Vector du = opcalc::apply(d1, u);
  for (int j = 0; j < grid.n; ++j) CHECK(std::abs(du(j) - 3.0 * std::cos(3.0 * grid.x(j))) < 1e-12);
  const Matrix d2 = fourier_diff_matrix(grid, 2).mat();
  CHECK((d2 - d1.mat() * d1.mat()).cwiseAbs().maxCoeff() < 1e-12);
  const Operator d8 = fourier_diff_matrix(PeriodicGrid(8, 2.0 * std::numbers::pi), 1);
  for (int j = 0; j < 8; ++j) CHECK(std::abs(d8(0, j) - oracle_values::kFourierD1Row0N8[j]) < 1e-13);
}

TEST_CASE("heat flow matches the FFT reference") {
  const PDEScenario sc = scenario(2, 2, "sin(x) + cos(2*x)/2");
  const ExampleReport r = example_residuals(sc);
  REQUIRE(r.times.back() == 1.0);
  CHECK(std::abs(r.solution_norm.back() - oracle_values::kHeatNormT1) < 1e-12);
  for (double v : r.operator_residual) CHECK(v < 1e-10);
}

TEST_CASE("literal reading leaves the predicted remainder") {
  for (int order : {2, 3}) {
    const ExampleReport r = example_residuals(scenario(1, order, "sin(x) + cos(2*x)"));
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      CHECK(r.operator_residual[i] < 1e-10);
      CHECK(std::abs(r.literal_residual[i] - r.literal_expected[i]) < 1e-9 * std::max(1.0, r.literal_expected[i]));
      CHECK(r.literal_expected[i] > 1.0);
    }
  }
}

TEST_CASE("growing modes restrict the horizon and trip the overflow guard") {
  const auto code = [](const PDEScenario& sc) {
    try {
      example_residuals(sc);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConvergenceFailure;
  };
  CHECK(code(scenario(4, 2, "sin(x)", 2.0)) == Errc::InvalidArgument);
  CHECK(code(scenario(4, 2, "sin(x)", 1.0)) == Errc::IntegrationBlowup);
  PDEScenario small = scenario(4, 2, "sin(x)", 0.2);
  small.grid = PeriodicGrid(8, 2.0 * std::numbers::pi);
  small.initial = sample_initial(small.grid, "sin(x)");
  const ExampleReport r = example_residuals(small);
  CHECK(std::abs(r.solution_norm.back() / r.solution_norm.front() - std::exp(0.2)) < 1e-8);
}

TEST_CASE("substitution on single modes") {
  const PDEScenario sc = scenario(1, 3, "sin(x) + cos(2*x)");
  const ModeCheck m = verify_mode_substitution(sc, 0.5, 2);
  CHECK(m.symbol_residual < 1e-10);
  CHECK(m.riccati_residual < 1e-10);
  CHECK(m.identity_residual < 1e-10);
  try {
    verify_mode_substitution(sc, 0.5, 5);
    FAIL("expected ZeroModeDivision");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroModeDivision);
  }
  const SubstitutionReport all = verify_operator_substitution(sc, 0.5);
  CHECK(all.max_residual < 1e-10);
  int active = 0;
  for (const auto& mc : all.modes) active += mc.skipped ? 0 : 1;
  CHECK(active == 4);
}

TEST_CASE("scenario parsing") {
  const auto sc = scenario_from_json(
      nlohmann::json::parse(R"j({"N": 16, "k": 2, "order": 2, "initial": "cos(x)", "T": 0.5})j"));
  CHECK(sc.grid.n == 16);
  CHECK(std::abs(sc.grid.length - 2.0 * std::numbers::pi) < 1e-15);
  try {
    scenario_from_json(nlohmann::json::parse(R"j({"N": 16, "order": 2, "initial": "cos(x)", "T": 0.5})j"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
  }
}
