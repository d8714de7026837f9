#pragma once

#include <vector>

#include "opcalc/linalg.hpp"

namespace opcalc::calc {

/// Circle {|zeta - center| = radius} traversed once counter-clockwise,
/// discretized by `nodes` equispaced trapezoidal nodes.
struct Contour {
  Complex center;
  double radius = 0.0;
  int nodes = 64;
};

struct CalcConfig {
  /// Required clearance between spectrum and circle, as a fraction of the radius.
  double spectral_margin = 0.1;
  /// Required distance between the closed disk and the cut (-inf, 0].
  double branch_margin = 1e-3;
  int initial_nodes = 64;
  int max_nodes = 4096;
  double quad_tol = 1e-11;
  /// Floor on the radius, as a fraction of the center's distance to the cut;
  /// keeps single-point spectra from producing a degenerate circle.
  double min_radius_fraction = 0.2;
  /// Use the serial reference kernel for the node sums.
  bool serial = false;
};

void validate(const CalcConfig& cfg);

/// Distance from z to the branch cut (-inf, 0].
double distance_to_cut(Complex z);

/// Holomorphic functions supported by the calculus. Both use the principal
/// branch Im Log in (-pi, pi]; the root is exp(Log(z) / n).
struct HoloFunction {
  enum class Kind { PrincipalLog, PrincipalRoot } kind = Kind::PrincipalLog;
  int n = 1;

  static HoloFunction log() { return {Kind::PrincipalLog, 1}; }
  static HoloFunction root(int n);
  Complex operator()(Complex z) const;
};

/// Centroid-of-spectrum circle with radius 1.2 x spread, falling back to a
/// searched center when that circle would touch the cut.
/// Throws BranchCutViolation when no admissible circle exists.
Contour build_contour(const Operator& m, const CalcConfig& cfg = {});

/// Circles whose disks hold every eigenvalue exactly once and clear the cut.
/// The single build_contour circle when one exists; otherwise eigenvalues are
/// grouped by proximity and each group gets its own circle, so the integral
/// becomes a sum over the circles. Throws BranchCutViolation when no grouping works.
std::vector<Contour> build_contours(const Operator& m, const CalcConfig& cfg = {});

/// Trapezoidal approximation of (1/2 pi i) \oint f(zeta) (zeta - m)^{-1} dzeta
/// with exactly `contour.nodes` nodes.
Matrix trapezoid(HoloFunction f, const Matrix& m, const Contour& contour, bool serial = false);

struct QuadratureResult {
  Operator value;
  std::vector<Contour> contours;  ///< nodes = count used for the accepted result
  double last_delta = 0.0;        ///< largest over the circles
};

/// Node-doubling quadrature on each circle of build_contours until successive
/// results differ by at most quad_tol * max(1, |partial|) in the spectral norm.
QuadratureResult riesz_dunford_detailed(HoloFunction f, const Operator& m, const CalcConfig& cfg = {});
Operator riesz_dunford(HoloFunction f, const Operator& m, const CalcConfig& cfg = {});

Operator principal_log(const Operator& m, const CalcConfig& cfg = {});
Operator principal_root(const Operator& m, int n, const CalcConfig& cfg = {});

/// True when every eigenvalue of `a` lies in the open sector |arg| < pi/n,
/// i.e. when principal_root(a^n, n) is expected to return `a` itself.
bool in_principal_sector(const Operator& a, int n);

}  // namespace opcalc::calc
