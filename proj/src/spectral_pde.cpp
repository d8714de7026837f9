#include "opcalc/spectral_pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opcalc/expr.hpp"
#include "opcalc/hierarchy.hpp"
#include "opcalc/kernels.hpp"

namespace opcalc::pde {

namespace {

constexpr double kModeThreshold = 1e-8;
constexpr double kGrowingGuard = 1e8;

void validate(const PDEScenario& sc) {
  if (sc.k < 1) throw Error(Errc::InvalidArgument, "spatial derivative power k must be >= 1");
  if (sc.order != 2 && sc.order != 3) throw Error(Errc::InvalidArgument, "target order must be 2 or 3");
  if (sc.initial.size() != sc.grid.n) throw Error(Errc::DimensionMismatch, "initial data length differs from N");
  if (!sc.initial.allFinite()) throw Error(Errc::InvalidArgument, "initial data must be finite");
  if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon)) throw Error(Errc::InvalidArgument, "horizon must be positive");
  if (sc.timesteps < 1) throw Error(Errc::InvalidArgument, "timesteps must be >= 1");
}

// Re (i xi)^k > 0 for some resolved mode exactly when k is a multiple of 4.
bool has_growing_modes(int k) { return k % 4 == 0; }

evolution::EvolutionFamily scenario_family(const PDEScenario& sc) {
  validate(sc);
  evolution::EvolutionConfig cfg;
  if (has_growing_modes(sc.k)) {
    if (sc.horizon > 1.0) {
      throw Error(Errc::InvalidArgument, "scenarios with growing modes are limited to horizons T <= 1");
    }
    cfg.overflow_guard = kGrowingGuard;
  }
  return evolution::EvolutionFamily(
      evolution::GeneratorFamily::constant(fourier_diff_matrix(sc.grid, sc.k), sc.horizon), cfg);
}

Complex mode_coefficient(const Vector& v, int mode) {
  const auto n = v.size();
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(mode) * static_cast<double>(j) / n;
    acc += v(j) * Complex(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(n);
}

Complex mode_symbol(const PeriodicGrid& grid, int mode, int power) {
  const Complex ik(0.0, 2.0 * std::numbers::pi * mode / grid.length);
  Complex s = 1.0;
  for (int p = 0; p < power; ++p) s *= ik;
  return s;
}

// u and its first three time derivatives at t.
struct Trajectory {
  Vector u;
  Vector d1, d2, d3;
};

Trajectory trajectory(const evolution::EvolutionFamily& ev, const Vector& u0, double t) {
  return {opcalc::apply(ev.propagate(t, 0.0), u0), opcalc::apply(ev.dt(t, 0.0, 1), u0), opcalc::apply(ev.dt(t, 0.0, 2), u0),
          opcalc::apply(ev.dt(t, 0.0, 3), u0)};
}

double largest_amplitude(const PeriodicGrid& grid, const Vector& u) {
  double peak = 0.0;
  for (int m = -grid.n / 2 + 1; m < grid.n / 2; ++m) peak = std::max(peak, std::abs(mode_coefficient(u, m)));
  return peak;
}

ModeCheck check_mode(const PDEScenario& sc, const Trajectory& tr, double peak, int mode) {
  ModeCheck check;
  check.mode = mode;
  const Complex c0 = mode_coefficient(tr.u, mode);
  check.amplitude = c0;
  if (!(std::abs(c0) > kModeThreshold * peak)) {
    throw Error(Errc::ZeroModeDivision, "mode " + std::to_string(mode) + " amplitude below threshold",
                std::abs(c0));
  }
  const Complex c1 = mode_coefficient(tr.d1, mode);
  const Complex c2 = mode_coefficient(tr.d2, mode);
  const Complex c3 = mode_coefficient(tr.d3, mode);
  const Complex sym = mode_symbol(sc.grid, mode, sc.k);

  // q = u^{-1} du/dt stands in for the spatial operator; its time derivative
  // follows from the substitution and vanishes on a single mode.
  const Complex q = c1 / c0;
  const Complex r2 = c2 / c0;
  const Complex r3 = c3 / c0;
  const Complex dq = -q * q + r2;
  const Complex ddq = -2.0 * q * dq + r3 - r2 * q;

  const double sym_scale = std::max(1.0, std::abs(sym));
  check.symbol_residual = std::abs(q - sym) / sym_scale;
  check.riccati_residual = std::abs(dq) / (sym_scale * sym_scale);

  Complex rhs;
  Complex target;
  if (sc.order == 2) {
    rhs = (dq + sym * sym) * c0;
    target = c2;
  } else {
    rhs = (ddq + 3.0 * sym * dq + sym * sym * sym) * c0;
    target = c3;
  }
  check.identity_residual = std::abs(rhs - target) / std::max(std::abs(target), std::abs(c0));
  return check;
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n_, double length_) : n(n_), length(length_) {
  if (n < 8 || n % 2 != 0) throw Error(Errc::InvalidArgument, "grid size must be even and >= 8");
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(Errc::InvalidArgument, "domain length must be positive");
}

Operator fourier_diff_matrix(const PeriodicGrid& grid, int power) {
  if (power < 1) throw Error(Errc::InvalidArgument, "derivative power must be >= 1");
  return Operator(kernels::fourier_diff(grid.n, grid.length, power));
}

Vector sample_initial(const PeriodicGrid& grid, const std::string& expression) {
  const expr::Expr f = expr::Expr::parse(expression, "x");
  Vector v(grid.n);
  for (int j = 0; j < grid.n; ++j) v(j) = f(Complex(grid.x(j), 0.0));
  if (!v.allFinite()) throw Error(Errc::InvalidArgument, "initial data is not finite on the grid");
  return v;
}

PDEScenario scenario_from_json(const nlohmann::json& j) {
  try {
    PDEScenario sc;
    sc.grid = PeriodicGrid(j.at("N").get<int>(), j.value("L", 2.0 * std::numbers::pi));
    sc.k = j.at("k").get<int>();
    sc.order = j.at("order").get<int>();
    sc.initial = sample_initial(sc.grid, j.at("initial").get<std::string>());
    sc.horizon = j.at("T").get<double>();
    sc.timesteps = j.value("timesteps", 10);
    validate(sc);
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario: ") + e.what());
  }
}

ExampleReport example_residuals(const PDEScenario& sc) {
  const evolution::EvolutionFamily ev = scenario_family(sc);
  const Matrix dk = ev.generator()(0.0).mat();
  const Matrix d2k = dk * dk;
  const Matrix d3k = d2k * dk;
  const hierarchy::OperatorFamilySeq seq = hierarchy::recurrence_build(ev.generator(), sc.order);

  const auto count = static_cast<std::size_t>(sc.timesteps) + 1;
  ExampleReport report;
  report.times.resize(count);
  report.operator_residual.resize(count);
  report.literal_residual.resize(count);
  report.literal_expected.resize(count);
  report.solution_norm.resize(count);

  kernels::parallel_for(static_cast<std::ptrdiff_t>(count), [&](std::ptrdiff_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const double t = idx + 1 == count ? sc.horizon : sc.horizon * static_cast<double>(i) / sc.timesteps;
    const Trajectory tr = trajectory(ev, sc.initial, t);
    const Operator a_n = seq.member(sc.order, t);
    report.times[idx] = t;
    report.solution_norm[idx] = tr.u.norm();
    if (sc.order == 2) {
      report.operator_residual[idx] = (tr.d2 - opcalc::apply(a_n, tr.u)).norm();
      report.literal_residual[idx] = (tr.d2 - (dk * tr.d1 + d2k * tr.u)).norm();
      report.literal_expected[idx] = (d2k * tr.u).norm();
    } else {
      report.operator_residual[idx] = (tr.d3 - opcalc::apply(a_n, tr.u)).norm();
      report.literal_residual[idx] = (tr.d3 - (dk * tr.d2 + 2.0 * (d2k * tr.d1) + d3k * tr.u)).norm();
      report.literal_expected[idx] = 3.0 * (d3k * tr.u).norm();
    }
  });
  return report;
}

ModeCheck verify_mode_substitution(const PDEScenario& sc, double t, int mode) {
  if (mode <= -sc.grid.n / 2 || mode >= sc.grid.n / 2) throw Error(Errc::InvalidArgument, "mode is not resolvable");
  const evolution::EvolutionFamily ev = scenario_family(sc);
  const Trajectory tr = trajectory(ev, sc.initial, t);
  return check_mode(sc, tr, largest_amplitude(sc.grid, tr.u), mode);
}

SubstitutionReport verify_operator_substitution(const PDEScenario& sc, double t) {
  const evolution::EvolutionFamily ev = scenario_family(sc);
  const Trajectory tr = trajectory(ev, sc.initial, t);
  const double peak = largest_amplitude(sc.grid, tr.u);

  SubstitutionReport report;
  report.t = t;
  for (int m = -sc.grid.n / 2 + 1; m < sc.grid.n / 2; ++m) {
    try {
      ModeCheck check = check_mode(sc, tr, peak, m);
      report.max_residual = std::max({report.max_residual, check.identity_residual, check.riccati_residual,
                                      check.symbol_residual});
      report.modes.push_back(std::move(check));
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroModeDivision) throw;
      ModeCheck skipped;
      skipped.mode = m;
      skipped.skipped = true;
      skipped.note = e.what();
      report.modes.push_back(std::move(skipped));
    }
  }
  return report;
}

}  // namespace opcalc::pde
