#include "opcalc/hierarchy.hpp"

#include <algorithm>
#include <string>

#include "opcalc/kernels.hpp"

namespace opcalc::hierarchy {

namespace {

Matrix shifted(const Matrix& u, Complex kappa) { return u + kappa * Matrix::Identity(u.rows(), u.cols()); }

Operator invert_derivative(const Operator& d, int k, const LinalgConfig& cfg) {
  try {
    return inverse(d, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::SingularOperator) throw;
    throw Error(Errc::SingularDerivative,
                "derivative of order " + std::to_string(k - 1) + " is not invertible (factor k=" + std::to_string(k) +
                    ")",
                static_cast<double>(k));
  }
}

void check_order(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "order must be >= 1");
}

// d^j/dt^j U(t, s) with the zeroth derivative being U itself.
Operator derivative_or_value(const EvolutionFamily& ev, double t, double s, int j) {
  return j == 0 ? ev.propagate(t, s) : ev.dt(t, s, j);
}

// The family U_k(t, s) = D_{k-1}(t) D_{k-1}(s)^{-1} and its t-derivative.
struct Factor {
  Matrix anchor_inverse;  // D_{k-1}(s)^{-1}
  Operator value;         // U_k(t, s)
  Operator derivative;    // D_k(t) D_{k-1}(s)^{-1}
};

Factor factor_family(const EvolutionFamily& ev, int k, double t, double s, const LinalgConfig& cfg) {
  Factor f{Matrix::Identity(ev.dim(), ev.dim()), Operator::identity(ev.dim()), Operator::identity(ev.dim())};
  if (k >= 2) f.anchor_inverse = invert_derivative(derivative_or_value(ev, s, s, k - 1), k, cfg).mat();
  f.value = Operator(derivative_or_value(ev, t, s, k - 1).mat() * f.anchor_inverse);
  f.derivative = Operator(ev.dt(t, s, k).mat() * f.anchor_inverse);
  return f;
}

Operator factor_log_derivative(const EvolutionFamily& ev, int k, double t, double s, Complex kappa,
                               const Factor& f, DerivativeMode mode, const LogrepConfig& cfg) {
  if (mode == DerivativeMode::Analytic) {
    const Operator w(shifted(f.value.mat(), kappa));
    calc::build_contours(w, cfg.calc);
    return f.derivative * inverse(w, cfg.linalg);
  }
  const Matrix anchor = f.anchor_inverse;
  const auto path = [&](double tau) { return Operator(derivative_or_value(ev, tau, s, k - 1).mat() * anchor); };
  return logrep::fd_log_derivative(path, t, s, ev.horizon(), kappa, ev.config().fd_step_fraction * ev.horizon(),
                                   ev.config().fd_tol, cfg.calc);
}

}  // namespace

// ---------------------------------------------------------------------------
// OperatorFamilySeq

OperatorFamilySeq::OperatorFamilySeq(GeneratorFamily generator, int order, Provenance provenance)
    : generator_(std::make_shared<const GeneratorFamily>(std::move(generator))),
      order_(order),
      provenance_(provenance) {
  check_order(order_);
  if (!generator_->has_analytic_derivatives() && order_ > kFdOrderCap) {
    throw Error(Errc::OrderCapExceeded,
                "order " + std::to_string(order_) + " needs finite-difference derivatives beyond the cap " +
                    std::to_string(kFdOrderCap),
                order_);
  }
}

void OperatorFamilySeq::inject_fault(int k, Operator shift) {
  if (k < 1 || k > order_) throw Error(Errc::InvalidArgument, "fault target outside 1..order");
  if (shift.dim() != dim()) throw Error(Errc::DimensionMismatch, "fault shift dimension");
  faults_.insert_or_assign(k, std::move(shift));
}

std::vector<Operator> OperatorFamilySeq::evaluate(double t, int upto) const {
  const GeneratorFamily& gen = *generator_;
  const Matrix a1 = gen(t).mat();
  std::vector<Matrix> values{a1};

  if (gen.structure() == evolution::Structure::Constant) {
    for (int k = 2; k <= upto; ++k) values.push_back(a1 * values.back());
  } else {
    // table[j] holds d^j/dt^j A_k for the current k, j = 0..upto-k.
    std::vector<Matrix> d1{a1};
    for (int j = 1; j < upto; ++j) d1.push_back(gen.derivative(t, j).mat());
    std::vector<Matrix> table = d1;
    for (int k = 2; k <= upto; ++k) {
      std::vector<Matrix> next;
      for (int j = 0; j <= upto - k; ++j) {
        Matrix acc = table[static_cast<std::size_t>(j + 1)];
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
          acc += binom * (d1[static_cast<std::size_t>(i)] * table[static_cast<std::size_t>(j - i)]);
          binom = binom * (j - i) / (i + 1);
        }
        next.push_back(std::move(acc));
      }
      table = std::move(next);
      values.push_back(table.front());
    }
  }

  std::vector<Operator> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Operator m(std::move(values[i]));
    if (auto it = faults_.find(static_cast<int>(i) + 1); it != faults_.end()) m = m + it->second;
    out.push_back(std::move(m));
  }
  return out;
}

Operator OperatorFamilySeq::member(int k, double t) const {
  if (k < 1 || k > order_) throw Error(Errc::InvalidArgument, "member index outside 1..order");
  return evaluate(t, k).back();
}

std::vector<Operator> OperatorFamilySeq::members(double t) const { return evaluate(t, order_); }

Operator miura_second_order(const GeneratorFamily& gen, double t) {
  const Operator a1 = gen(t);
  return gen.derivative(t, 1) + a1 * a1;
}

OperatorFamilySeq recurrence_build(const GeneratorFamily& gen, int n) {
  return OperatorFamilySeq(gen, n, Provenance::Recurrence);
}

// ---------------------------------------------------------------------------
// Verification

double HierarchyReport::max_residual(int k) const {
  const auto& row = residuals.at(static_cast<std::size_t>(k - 1));
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

double HierarchyReport::max_residual() const {
  double worst = 0.0;
  for (std::size_t k = 1; k <= residuals.size(); ++k) worst = std::max(worst, max_residual(static_cast<int>(k)));
  return worst;
}

HierarchyReport verify_nth_order(const OperatorFamilySeq& seq, const EvolutionFamily& ev, const TimeGrid& grid,
                                 const Vector& seed_vector) {
  if (seq.dim() != ev.dim() || seed_vector.size() != ev.dim()) {
    throw Error(Errc::DimensionMismatch, "sequence, evolution family and seed vector dimensions differ");
  }
  if (!(seed_vector.norm() > 0.0)) throw Error(Errc::InvalidArgument, "seed vector must be nonzero");

  const auto& pts = grid.points();
  const double s = pts.front();
  const int n = seq.order();

  HierarchyReport report;
  report.grid = pts;
  report.commutation_met = logrep::commutation_hypothesis_met(ev.generator());
  report.residuals.assign(static_cast<std::size_t>(n), std::vector<double>(pts.size(), 0.0));

  kernels::parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t i) {
    const double t = pts[static_cast<std::size_t>(i)];
    const Vector psi = opcalc::apply(ev.propagate(t, s), seed_vector);
    const double psi_norm = psi.norm();
    const std::vector<Operator> members = seq.members(t);
    for (int k = 1; k <= n; ++k) {
      const Vector lhs = opcalc::apply(ev.dt(t, s, k), seed_vector);
      const Vector rhs = opcalc::apply(members[static_cast<std::size_t>(k - 1)], psi);
      report.residuals[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] = (lhs - rhs).norm() / psi_norm;
    }
  });
  return report;
}

// ---------------------------------------------------------------------------
// Product representations

Operator factorize_product(const EvolutionFamily& ev, int n, double t, double s, const LinalgConfig& cfg) {
  check_order(n);
  Operator product = Operator::identity(ev.dim());
  Operator previous = ev.propagate(t, s);
  for (int k = 1; k <= n; ++k) {
    Operator current = ev.dt(t, s, k);
    product = product * (invert_derivative(previous, k, cfg) * current);
    previous = std::move(current);
  }
  return product;
}

Operator log_product_representation(const EvolutionFamily& ev, int n, double t, double s, Complex kappa,
                                    DerivativeMode mode, const LogrepConfig& cfg) {
  check_order(n);
  Operator product = Operator::identity(ev.dim());
  for (int k = 1; k <= n; ++k) {
    const Factor f = factor_family(ev, k, t, s, cfg.linalg);
    const Operator backward = inverse(f.value, cfg.linalg);
    const Operator left = kappa * backward + Operator::identity(ev.dim());
    product = product * (left * factor_log_derivative(ev, k, t, s, kappa, f, mode, cfg));
  }
  return product;
}

Operator alt_log_product(const EvolutionFamily& ev, int n, double t, double s, Complex kappa, DerivativeMode mode,
                         const LogrepConfig& cfg) {
  check_order(n);
  Operator product = Operator::identity(ev.dim());
  for (int k = 1; k <= n; ++k) {
    const Factor f = factor_family(ev, k, t, s, cfg.linalg);
    const Operator alpha = calc::principal_log(Operator(shifted(f.value.mat(), kappa)), cfg.calc);
    const Operator left = Operator::identity(ev.dim()) - kappa * operator_exp(-alpha);
    product = product * (inverse(left, cfg.linalg) * factor_log_derivative(ev, k, t, s, kappa, f, mode, cfg));
  }
  return product;
}

Complex select_product_kappa(const EvolutionFamily& ev, int n, const TimeGrid& grid, const LinalgConfig& cfg) {
  check_order(n);
  const auto& pts = grid.points();
  const double s = pts.front();
  double rho = 1.0;
  for (int k = 1; k <= n; ++k) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      rho = std::max(rho, spectrum(factor_family(ev, k, pts[i], s, cfg).value).spectral_radius);
    }
  }
  return {1.0 + rho, 0.0};
}

Operator hille_yosida_gen(const Operator& a_n, int n, double t, const calc::CalcConfig& cfg) {
  check_order(n);
  return operator_exp(scale(calc::principal_root(a_n, n, cfg), t));
}

RootCheck fractional_power_roundtrip(const Operator& a, int n, const calc::CalcConfig& cfg) {
  check_order(n);
  Matrix power = a.mat();
  for (int k = 1; k < n; ++k) power = a.mat() * power;
  const Operator a_n(power);
  const Operator root = calc::principal_root(a_n, n, cfg);
  Matrix root_power = root.mat();
  for (int k = 1; k < n; ++k) root_power = root.mat() * root_power;

  RootCheck check;
  check.in_sector = calc::in_principal_sector(a, n);
  check.power_residual = norm2(Matrix(root_power - power)) / (1.0 + norm2(power));
  check.roundtrip_error = norm2(root - a);
  return check;
}

double ordering_sensitivity(const EvolutionFamily& ev, int n, double t, double s, const LinalgConfig& cfg) {
  check_order(n);
  std::vector<Matrix> factors;
  Operator previous = ev.propagate(t, s);
  for (int k = 1; k <= n; ++k) {
    Operator current = ev.dt(t, s, k);
    factors.push_back((invert_derivative(previous, k, cfg) * current).mat());
    previous = std::move(current);
  }
  Matrix forward = Matrix::Identity(ev.dim(), ev.dim());
  Matrix reverse = forward;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    forward = forward * factors[k];
    reverse = reverse * factors[factors.size() - 1 - k];
  }
  return norm2(Matrix(forward - reverse));
}

double factor_form_discrepancy(const EvolutionFamily& ev, int k, double t, double s, const LinalgConfig& cfg) {
  check_order(k);
  const Operator lower = derivative_or_value(ev, t, s, k - 1);
  const Operator upper = ev.dt(t, s, k);
  const Operator inv = invert_derivative(lower, k, cfg);
  return norm2(upper * inv - inv * upper);
}

}  // namespace opcalc::hierarchy
