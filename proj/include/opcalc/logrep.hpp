#pragma once

#include "opcalc/evolution.hpp"
#include "opcalc/functional_calculus.hpp"

namespace opcalc::logrep {

using evolution::EvolutionFamily;
using evolution::TimeGrid;

/// a = Log(U(t, s) + kappa I), the shifted logarithm of the propagator.
struct ShiftedLog {
  Complex kappa;
  Operator a;
  double t = 0.0;
  double s = 0.0;
};

/// How d/dt Log(U + kappa I) is obtained: from [dU/dt](U + kappa I)^{-1}, or
/// by finite differences of the contour-quadrature logarithm in t.
enum class DerivativeMode { Analytic, FiniteDifference };

struct LogrepConfig {
  calc::CalcConfig calc;
  LinalgConfig linalg;
};

/// kappa = 1 + max over grid pairs s <= t of rho(U(t, s)). Every eigenvalue of
/// U + kappa I then has real part >= 1 on the whole grid.
Complex select_kappa(const EvolutionFamily& ev, const TimeGrid& grid);

ShiftedLog alt_generator(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg = {});

Operator dt_alt_generator(const EvolutionFamily& ev, double t, double s, Complex kappa,
                          DerivativeMode mode = DerivativeMode::Analytic, const LogrepConfig& cfg = {});

/// (I - kappa e^{-a})^{-1} d/dt a: recovers A_1(t) without inverting U.
Operator recover_generator_alt(const EvolutionFamily& ev, double t, double s, Complex kappa,
                               DerivativeMode mode = DerivativeMode::Analytic, const LogrepConfig& cfg = {});

/// (I + kappa U(s, t)) d/dt Log(U(t, s) + kappa I) with U(s, t) = U(t, s)^{-1}.
Operator recover_generator_original(const EvolutionFamily& ev, double t, double s, Complex kappa,
                                    DerivativeMode mode = DerivativeMode::Analytic, const LogrepConfig& cfg = {});

/// |e^{-a(t, s)} - e^{a(s, t)}| with a(s, t) = Log(U(t, s)^{-1} + kappa I).
double nongroup_discrepancy(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg = {});

/// |[d/dt Log(U + kappa I)] x - (U + kappa I)^{-1} A(t) U x| / |x|, with the
/// left side by finite differences. Constant and commuting families only.
double dt_log_identity_check(const EvolutionFamily& ev, double t, double s, Complex kappa, const Vector& x,
                             const LogrepConfig& cfg = {});

/// |A_1 - (I - kappa e^{-a})^{-1} A_1 (I - kappa e^{-a})|.
double consistency_residual(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg = {});

/// Whether the commutation hypothesis behind the recovery formulas holds by construction.
bool commutation_hypothesis_met(const evolution::GeneratorFamily& gen);

/// Finite-difference derivative in t of Log(W(t) + kappa I) for an operator
/// path W on [lo, hi]; shared with the hierarchy products.
Operator fd_log_derivative(const std::function<Operator(double)>& path, double t, double lo, double hi,
                           Complex kappa, double step, double fd_tol, const calc::CalcConfig& cfg);

}  // namespace opcalc::logrep
