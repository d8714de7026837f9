#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "opcalc/evolution.hpp"

namespace opcalc::pde {

/// N equispaced points x_j = j L / N on a period-L domain; N even, N >= 8.
struct PeriodicGrid {
  int n = 32;
  double length = 6.283185307179586;

  PeriodicGrid() = default;
  PeriodicGrid(int n, double length);
  double x(int j) const { return length * j / n; }
};

/// Spectral differentiation of order `power`; exact on e^{i m 2 pi x / L}, |m| < N/2.
Operator fourier_diff_matrix(const PeriodicGrid& grid, int power);

/// du/dt = D^k u on a periodic grid, checked against an order-n equation.
struct PDEScenario {
  PeriodicGrid grid;
  int k = 1;
  int order = 2;
  Vector initial;
  double horizon = 1.0;
  int timesteps = 10;
};

/// Samples an expression in x on the grid.
Vector sample_initial(const PeriodicGrid& grid, const std::string& expression);

/// {"N", "L", "k", "order", "initial": "<expr in x>", "T", "timesteps"}; L defaults to 2 pi.
PDEScenario scenario_from_json(const nlohmann::json& j);

struct ExampleReport {
  std::vector<double> times;
  /// |d^n u - A_n u| with A_n from the recurrence; zero in exact arithmetic.
  std::vector<double> operator_residual;
  /// The same equation with mixed derivatives read as commuting partials.
  std::vector<double> literal_residual;
  /// What the literal reading leaves over on true solutions:
  /// |D^{2k} u| for n = 2, 3 |D^{3k} u| for n = 3.
  std::vector<double> literal_expected;
  std::vector<double> solution_norm;
};

ExampleReport example_residuals(const PDEScenario& sc);

struct ModeCheck {
  int mode = 0;
  bool skipped = false;
  std::string note;
  Complex amplitude;
  /// |u^{-1} du/dt - (i m 2 pi / L)^k| / max(1, |symbol|).
  double symbol_residual = 0.0;
  /// |-(u^{-1} du/dt)^2 + (d2u/dt2) u^{-1} - d/dt(u^{-1} du/dt)|, relative; the
  /// time derivative of the ratio vanishes for a single mode.
  double riccati_residual = 0.0;
  /// |right side of the order-n equation under substitution - d^n u/dt^n|, relative.
  double identity_residual = 0.0;
};

struct SubstitutionReport {
  double t = 0.0;
  std::vector<ModeCheck> modes;
  double max_residual = 0.0;
};

/// Single-mode check; throws ZeroModeDivision when the mode amplitude is below threshold.
ModeCheck verify_mode_substitution(const PDEScenario& sc, double t, int mode);

/// All resolvable modes; zero modes are recorded as skipped.
SubstitutionReport verify_operator_substitution(const PDEScenario& sc, double t);

}  // namespace opcalc::pde
