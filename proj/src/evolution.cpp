#include "opcalc/evolution.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "opcalc/fd.hpp"

namespace opcalc::evolution {

namespace {

constexpr double kSlack = 1e-12;

bool finite_and_bounded(const Matrix& m, double guard) {
  return m.allFinite() && m.cwiseAbs().maxCoeff() <= guard;
}

double rel_diff(const Matrix& a, const Matrix& b, double floor) {
  return norm2(Matrix(a - b)) / std::max(norm2(b), floor);
}

// Fourth-order finite difference of `sample` with a step-halving check;
// returns the Richardson combination of the two estimates.
template <class F>
Matrix checked_fd(F&& sample, double t, int order, double h, double lo, double hi, double fd_tol, double floor) {
  const fd::Stencil coarse = fd::make_stencil(order, t, h, lo, hi);
  const fd::Stencil fine = fd::make_stencil(order, t, 0.5 * h, lo, hi);
  const Matrix d_coarse = fd::apply(coarse, t, sample);
  const Matrix d_fine = fd::apply(fine, t, sample);
  const double disagreement = rel_diff(d_coarse, d_fine, floor);
  if (disagreement > fd_tol) {
    throw Error(Errc::DerivativeNoise,
                "step-halving disagreement " + std::to_string(disagreement) + " above " + std::to_string(fd_tol),
                disagreement);
  }
  return (16.0 * d_fine - d_coarse) / 15.0;
}

Complex eval_profile(const expr::Expr& f, double t) { return f(Complex(t, 0.0)); }

}  // namespace

// ---------------------------------------------------------------------------
// GeneratorFamily

GeneratorFamily::GeneratorFamily(int dim, double horizon, std::variant<Constant, Commuting, General> spec)
    : dim_(dim), horizon_(horizon), spec_(std::move(spec)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw Error(Errc::InvalidArgument, "horizon must be positive");
}

GeneratorFamily GeneratorFamily::constant(Operator a, double horizon) {
  const int d = a.dim();
  return GeneratorFamily(d, horizon, Constant{std::move(a)});
}

GeneratorFamily GeneratorFamily::commuting(expr::Expr profile, Operator base, double horizon) {
  const int d = base.dim();
  return GeneratorFamily(d, horizon, Commuting{std::move(profile), std::move(base)});
}

GeneratorFamily GeneratorFamily::general(int dim, std::function<Operator(double)> eval,
                                         std::function<Operator(double, int)> derivative, double horizon) {
  if (!eval) throw Error(Errc::InvalidArgument, "general generator needs an evaluator");
  GeneratorFamily g(dim, horizon, General{std::move(eval), std::move(derivative)});
  if (g(0.0).dim() != dim) throw Error(Errc::DimensionMismatch, "evaluator dimension differs from declared dim");
  return g;
}

Structure GeneratorFamily::structure() const noexcept {
  if (std::holds_alternative<Constant>(spec_)) return Structure::Constant;
  if (std::holds_alternative<Commuting>(spec_)) return Structure::Commuting;
  return Structure::General;
}

bool GeneratorFamily::has_analytic_derivatives() const noexcept {
  if (const auto* g = std::get_if<General>(&spec_)) return static_cast<bool>(g->derivative);
  return true;
}

Operator GeneratorFamily::operator()(double t) const {
  if (const auto* c = std::get_if<Constant>(&spec_)) return c->a;
  if (const auto* c = std::get_if<Commuting>(&spec_)) return scale(c->base, eval_profile(c->profile, t));
  return std::get<General>(spec_).eval(t);
}

Operator GeneratorFamily::derivative(double t, int k) const {
  if (k < 1) throw Error(Errc::InvalidArgument, "derivative order must be >= 1");
  if (std::holds_alternative<Constant>(spec_)) return Operator::zero(dim_);
  if (const auto* c = std::get_if<Commuting>(&spec_)) {
    return scale(c->base, eval_profile(c->profile.derivative(k), t));
  }
  const auto& g = std::get<General>(spec_);
  if (g.derivative) return g.derivative(t, k);
  if (k > 4) throw Error(Errc::OrderCapExceeded, "finite-difference generator derivatives are capped at order 4", k);
  const double h = 1e-2 * horizon_ * k;
  // Derivatives that vanish at t are compared on the scale of A_1 itself.
  const double floor = (1.0 + norm2((*this)(t))) / std::pow(horizon_, k);
  return Operator(checked_fd([&](double tau) { return g.eval(tau).mat(); }, t, k, h, 0.0, horizon_, 1e-5, floor));
}

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw Error(Errc::InvalidArgument, "time grid needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw Error(Errc::InvalidArgument, "time grid point is not finite");
    if (i > 0 && !(points_[i] > points_[i - 1])) throw Error(Errc::InvalidArgument, "time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double first, double last, int count) {
  if (count < 2) throw Error(Errc::InvalidArgument, "time grid needs at least two points");
  std::vector<double> pts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts[static_cast<std::size_t>(i)] = first + (last - first) * i / (count - 1);
  pts.back() = last;
  return TimeGrid(std::move(pts));
}

// ---------------------------------------------------------------------------
// EvolutionFamily

EvolutionFamily::EvolutionFamily(GeneratorFamily generator, EvolutionConfig cfg)
    : generator_(std::move(generator)), cfg_(cfg), cache_(std::make_shared<Cache>()) {
  if (!(cfg_.ode_step > 0.0) || !(cfg_.fd_step_fraction > 0.0) || !(cfg_.fd_tol > 0.0)) {
    throw Error(Errc::InvalidArgument, "evolution steps and tolerances must be positive");
  }
}

Method EvolutionFamily::method() const noexcept {
  switch (generator_.structure()) {
    case Structure::Constant: return Method::MatrixExp;
    case Structure::Commuting: return Method::ExpOfIntegral;
    case Structure::General: break;
  }
  return Method::ODEIntegrate;
}

Operator EvolutionFamily::propagate(double t, double s) const {
  const double T = horizon();
  if (!(s >= -kSlack * T) || !(t >= s) || !(t <= T * (1.0 + kSlack))) {
    throw Error(Errc::HorizonViolation,
                "need 0 <= s <= t <= T, got s=" + std::to_string(s) + " t=" + std::to_string(t) +
                    " T=" + std::to_string(T));
  }
  if (t == s) return Operator::identity(dim());

  const auto key = std::make_pair(t, s);
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  Operator value(compute(t, s));
  std::unique_lock lock(cache_->mutex);
  return cache_->values.try_emplace(key, std::move(value)).first->second;
}

Matrix EvolutionFamily::local_propagator(double from, double to, int steps) const {
  Matrix u = Matrix::Identity(dim(), dim());
  if (steps == 0 || from == to) return u;
  const double h = (to - from) / steps;
  const auto& eval = generator_;
  for (int i = 0; i < steps; ++i) {
    const double tau = from + i * h;
    const Matrix a0 = eval(tau).mat();
    const Matrix am = eval(tau + 0.5 * h).mat();
    const Matrix a1 = eval(i + 1 == steps ? to : tau + h).mat();
    const Matrix k1 = a0 * u;
    const Matrix k2 = am * (u + 0.5 * h * k1);
    const Matrix k3 = am * (u + 0.5 * h * k2);
    const Matrix k4 = a1 * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite_and_bounded(u, cfg_.overflow_guard)) {
      throw Error(Errc::IntegrationBlowup, "propagator norm exceeded the overflow guard at t=" + std::to_string(tau));
    }
  }
  return u;
}

Matrix EvolutionFamily::compute(double t, double s) const {
  Matrix result;
  if (const auto* c = std::get_if<GeneratorFamily::Constant>(&generator_.spec())) {
    result = matrix_exp((t - s) * c->a.mat());
  } else if (const auto* c = std::get_if<GeneratorFamily::Commuting>(&generator_.spec())) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const auto f = [&](double tau) { return eval_profile(c->profile, tau); };
    const Complex integral = gauss_kronrod<double, 15>::integrate(f, s, t, 20, cfg_.integral_tol, &err);
    result = matrix_exp(integral * c->base.mat());
  } else {
    // Classical RK4 at steps h and h/2, combined by Richardson extrapolation.
    const int steps = std::max(1, static_cast<int>(std::ceil((t - s) / cfg_.ode_step - 1e-9)));
    const Matrix coarse = local_propagator(s, t, steps);
    const Matrix fine = local_propagator(s, t, 2 * steps);
    result = fine + (fine - coarse) / 15.0;
  }
  if (!finite_and_bounded(result, cfg_.overflow_guard)) {
    throw Error(Errc::IntegrationBlowup, "propagator norm exceeded the overflow guard");
  }
  return result;
}

Matrix EvolutionFamily::general_derivative(double t, double s, int m) const {
  // d^m/dt^m U(t, s) = [d^m/dtau^m U(tau, t)]_{tau = t} U(t, s); the local
  // propagator only needs short solves around t, taken with a fixed substep
  // so its error is smooth in tau.
  const double T = horizon();
  const double h = cfg_.fd_step_fraction * T * m;
  const double floor = std::pow(norm2(generator_(t)) + 1.0 / T, m);
  const auto sample_with = [&](double step) {
    const int substeps = std::max(1, static_cast<int>(std::ceil(step / cfg_.ode_step - 1e-9)));
    return [this, t, step, substeps](double tau) {
      const int units = static_cast<int>(std::lround((tau - t) / step));
      return local_propagator(t, tau, std::abs(units) * substeps);
    };
  };
  const fd::Stencil coarse = fd::make_stencil(m, t, h, 0.0, T);
  const fd::Stencil fine = fd::make_stencil(m, t, 0.5 * h, 0.0, T);
  const Matrix d_coarse = fd::apply(coarse, t, sample_with(h));
  const Matrix d_fine = fd::apply(fine, t, sample_with(0.5 * h));
  const double disagreement = rel_diff(d_coarse, d_fine, floor);
  if (disagreement > cfg_.fd_tol) {
    throw Error(Errc::DerivativeNoise,
                "step-halving disagreement " + std::to_string(disagreement) + " above " + std::to_string(cfg_.fd_tol),
                disagreement);
  }
  const Matrix local = (16.0 * d_fine - d_coarse) / 15.0;
  return local * propagate(t, s).mat();
}

Operator EvolutionFamily::dt(double t, double s, int m) const {
  if (m < 1) throw Error(Errc::InvalidArgument, "derivative order must be >= 1");
  const Operator u = propagate(t, s);

  if (const auto* c = std::get_if<GeneratorFamily::Constant>(&generator_.spec())) {
    Matrix p = c->a.mat();
    for (int k = 1; k < m; ++k) p = c->a.mat() * p;
    return Operator(p * u.mat());
  }
  if (m > 4) throw Error(Errc::OrderCapExceeded, "time derivatives of non-constant families are capped at order 4", m);

  if (const auto* c = std::get_if<GeneratorFamily::Commuting>(&generator_.spec())) {
    // Derivatives of exp(F(t) B) with F' = f, collected by powers of B.
    const Complex f = eval_profile(c->profile, t);
    const Complex f1 = m >= 2 ? eval_profile(c->profile.derivative(1), t) : 0.0;
    const Complex f2 = m >= 3 ? eval_profile(c->profile.derivative(2), t) : 0.0;
    const Complex f3 = m >= 4 ? eval_profile(c->profile.derivative(3), t) : 0.0;
    const Matrix& b = c->base.mat();
    const Matrix b2 = b * b;
    Matrix p;
    switch (m) {
      case 1: p = f * b; break;
      case 2: p = f1 * b + f * f * b2; break;
      case 3: p = f2 * b + 3.0 * f * f1 * b2 + f * f * f * (b2 * b); break;
      default: {
        const Matrix b3 = b2 * b;
        p = f3 * b + (4.0 * f * f2 + 3.0 * f1 * f1) * b2 + 6.0 * f * f * f1 * b3 + f * f * f * f * (b3 * b);
      }
    }
    return Operator(p * u.mat());
  }
  return Operator(general_derivative(t, s, m));
}

// ---------------------------------------------------------------------------
// Checks

double check_semigroup(const EvolutionFamily& ev, double s, double r, double t) {
  if (!(s <= r && r <= t)) throw Error(Errc::HorizonViolation, "need s <= r <= t");
  const Matrix lhs = ev.propagate(t, r).mat() * ev.propagate(r, s).mat();
  return norm2(Matrix(lhs - ev.propagate(t, s).mat()));
}

GrowthBound fit_growth_bound(EvolutionFamily& ev, const TimeGrid& grid) {
  const auto& pts = grid.points();
  if (pts.front() < 0.0 || pts.back() > ev.horizon() * (1.0 + kSlack)) {
    throw Error(Errc::HorizonViolation, "grid leaves the horizon");
  }
  std::vector<double> taus;
  std::vector<double> logs;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      taus.push_back(pts[j] - pts[i]);
      logs.push_back(std::log(norm2(ev.propagate(pts[j], pts[i]))));
    }
  }

  double omega = 0.0;
  if (const auto* c = std::get_if<GeneratorFamily::Constant>(&ev.generator().spec())) {
    omega = -std::numeric_limits<double>::infinity();
    for (const auto& lambda : eigenvalues(c->a.mat())) omega = std::max(omega, lambda.real());
  } else {
    const double n = static_cast<double>(taus.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      st += taus[k];
      sy += logs[k];
      stt += taus[k] * taus[k];
      sty += taus[k] * logs[k];
    }
    const double var = stt - st * st / n;
    omega = var > 0.0 ? (sty - st * sy / n) / var : sy / st;
  }

  double log_m = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) log_m = std::max(log_m, logs[k] - omega * taus[k]);
  GrowthBound g{std::exp(log_m), omega};
  ev.set_growth(g);
  return g;
}

ResolventEstimateReport resolvent_estimate_check(const GeneratorFamily& gen, double s, double t,
                                                 std::span<const Complex> lambdas) {
  const auto* c = std::get_if<GeneratorFamily::Constant>(&gen.spec());
  if (c == nullptr) throw Error(Errc::InvalidArgument, "resolvent estimate applies to constant generators only");
  if (!(t > s)) throw Error(Errc::InvalidArgument, "need t > s");

  ResolventEstimateReport report;
  double abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : eigenvalues(c->a.mat())) abscissa = std::max(abscissa, lambda.real());
  if (abscissa > 1e-12) {
    report.applicable = false;
    report.note = "spectrum reaches Re > 0 (abscissa " + std::to_string(abscissa) + "); hypothesis not met";
    return report;
  }

  const Operator scaled = scale(c->a, t - s);
  for (const auto& lambda : lambdas) {
    if (!(lambda.real() > 0.0)) throw Error(Errc::InvalidArgument, "samples need Re(lambda) > 0");
    const Operator r = resolvent(scaled, lambda);
    report.ratios.push_back(lambda.real() * norm2(r));
  }
  report.fitted_c = report.ratios.empty() ? 0.0 : *std::max_element(report.ratios.begin(), report.ratios.end());

  // sup over tau >= 0 of |exp(tau A)| on a log-spaced grid.
  double sup = 1.0;
  const Matrix& a = c->a.mat();
  for (int k = 0; k <= 480; ++k) {
    const double tau = std::pow(10.0, -4.0 + 8.0 * k / 480.0);
    const double nrm = norm2(matrix_exp(tau * a));
    sup = std::max(sup, nrm);
    if (nrm < 1e-6 * sup && tau > 1.0) break;
  }
  report.growth_constant = sup;
  report.passed = report.fitted_c <= sup * (1.0 + 1e-9);
  report.note = "ratio bounded by sup |exp(tau A)|";
  return report;
}

}  // namespace opcalc::evolution
