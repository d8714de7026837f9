#include "opcalc/logrep.hpp"

#include <algorithm>
#include <string>

#include "opcalc/fd.hpp"

namespace opcalc::logrep {

namespace {

Operator shifted(const Operator& u, Complex kappa) { return Operator(u.mat() + kappa * Matrix::Identity(u.dim(), u.dim())); }

Operator log_or_explain(const Operator& m, const calc::CalcConfig& cfg) {
  try {
    return calc::principal_log(m, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::BranchCutViolation) throw;
    throw Error(Errc::BranchCutViolation, std::string(e.what()) + " (select_kappa gives an admissible shift)",
                e.value(), e.point());
  }
}

double fd_step(const EvolutionFamily& ev) { return ev.config().fd_step_fraction * ev.horizon(); }

}  // namespace

Complex select_kappa(const EvolutionFamily& ev, const TimeGrid& grid) {
  double rho = 1.0;  // U(s, s) = I
  const auto& pts = grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      rho = std::max(rho, spectrum(ev.propagate(pts[j], pts[i])).spectral_radius);
    }
  }
  return {1.0 + rho, 0.0};
}

ShiftedLog alt_generator(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg) {
  return {kappa, log_or_explain(shifted(ev.propagate(t, s), kappa), cfg.calc), t, s};
}

Operator fd_log_derivative(const std::function<Operator(double)>& path, double t, double lo, double hi,
                           Complex kappa, double step, double fd_tol, const calc::CalcConfig& cfg) {
  const auto sample = [&](double tau) { return log_or_explain(shifted(path(tau), kappa), cfg).mat(); };
  const fd::Stencil coarse = fd::make_stencil(1, t, step, lo, hi);
  const fd::Stencil fine = fd::make_stencil(1, t, 0.5 * step, lo, hi);
  const Matrix d_coarse = fd::apply(coarse, t, sample);
  const Matrix d_fine = fd::apply(fine, t, sample);
  const double scale = std::max(norm2(d_fine), 1.0 / (hi - lo));
  const double disagreement = norm2(Matrix(d_coarse - d_fine)) / scale;
  if (disagreement > fd_tol) {
    throw Error(Errc::DerivativeNoise, "step-halving disagreement " + std::to_string(disagreement), disagreement);
  }
  return Operator((16.0 * d_fine - d_coarse) / 15.0);
}

Operator dt_alt_generator(const EvolutionFamily& ev, double t, double s, Complex kappa, DerivativeMode mode,
                          const LogrepConfig& cfg) {
  if (mode == DerivativeMode::Analytic) {
    const Operator u = ev.propagate(t, s);
    // The shifted log must exist for the formula to mean anything.
    calc::build_contours(shifted(u, kappa), cfg.calc);
    return ev.dt(t, s, 1) * inverse(shifted(u, kappa), cfg.linalg);
  }
  return fd_log_derivative([&](double tau) { return ev.propagate(tau, s); }, t, s, ev.horizon(), kappa,
                           fd_step(ev), ev.config().fd_tol, cfg.calc);
}

Operator recover_generator_alt(const EvolutionFamily& ev, double t, double s, Complex kappa, DerivativeMode mode,
                               const LogrepConfig& cfg) {
  const ShiftedLog a = alt_generator(ev, t, s, kappa, cfg);
  const Operator exp_neg = operator_exp(-a.a);
  const Operator left = Operator::identity(ev.dim()) - kappa * exp_neg;
  return inverse(left, cfg.linalg) * dt_alt_generator(ev, t, s, kappa, mode, cfg);
}

Operator recover_generator_original(const EvolutionFamily& ev, double t, double s, Complex kappa,
                                    DerivativeMode mode, const LogrepConfig& cfg) {
  const Operator backward = inverse(ev.propagate(t, s), cfg.linalg);
  const Operator left = Operator::identity(ev.dim()) + kappa * backward;
  return left * dt_alt_generator(ev, t, s, kappa, mode, cfg);
}

double nongroup_discrepancy(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg) {
  const Operator u = ev.propagate(t, s);
  const Operator forward = log_or_explain(shifted(u, kappa), cfg.calc);
  const Operator backward = log_or_explain(shifted(inverse(u, cfg.linalg), kappa), cfg.calc);
  return norm2(operator_exp(-forward) - operator_exp(backward));
}

bool commutation_hypothesis_met(const evolution::GeneratorFamily& gen) {
  return gen.structure() != evolution::Structure::General;
}

double dt_log_identity_check(const EvolutionFamily& ev, double t, double s, Complex kappa, const Vector& x,
                             const LogrepConfig& cfg) {
  if (!commutation_hypothesis_met(ev.generator())) {
    throw Error(Errc::InvalidArgument, "the log-derivative identity is only established for commuting families");
  }
  const double xnorm = x.norm();
  if (!(xnorm > 0.0)) throw Error(Errc::InvalidArgument, "test vector must be nonzero");
  const Operator u = ev.propagate(t, s);
  const Operator lhs = dt_alt_generator(ev, t, s, kappa, DerivativeMode::FiniteDifference, cfg);
  const Vector rhs = inverse(shifted(u, kappa), cfg.linalg).mat() * (ev.generator()(t).mat() * (u.mat() * x));
  return (opcalc::apply(lhs, x) - rhs).norm() / xnorm;
}

double consistency_residual(const EvolutionFamily& ev, double t, double s, Complex kappa, const LogrepConfig& cfg) {
  const ShiftedLog a = alt_generator(ev, t, s, kappa, cfg);
  const Operator p = Operator::identity(ev.dim()) - kappa * operator_exp(-a.a);
  const Operator a1 = ev.generator()(t);
  return norm2(a1 - inverse(p, cfg.linalg) * a1 * p);
}

}  // namespace opcalc::logrep
