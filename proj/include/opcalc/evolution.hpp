#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "opcalc/expr.hpp"
#include "opcalc/linalg.hpp"

namespace opcalc::evolution {

enum class Structure { Constant, Commuting, General };

/// Time-parametrized generator t -> A_1(t) on the horizon [0, T].
class GeneratorFamily {
 public:
  struct Constant {
    Operator a;
  };
  /// A_1(t) = f(t) B; members commute by construction.
  struct Commuting {
    expr::Expr profile;
    Operator base;
  };
  struct General {
    std::function<Operator(double)> eval;
    /// d^k/dt^k A_1(t) for k >= 1; empty when only finite differences are available.
    std::function<Operator(double, int)> derivative;
  };

  static GeneratorFamily constant(Operator a, double horizon = 1.0);
  static GeneratorFamily commuting(expr::Expr profile, Operator base, double horizon = 1.0);
  static GeneratorFamily general(int dim, std::function<Operator(double)> eval,
                                 std::function<Operator(double, int)> derivative = {}, double horizon = 1.0);

  int dim() const noexcept { return dim_; }
  double horizon() const noexcept { return horizon_; }
  Structure structure() const noexcept;
  bool has_analytic_derivatives() const noexcept;

  Operator operator()(double t) const;
  /// d^k/dt^k A_1(t), k >= 1. Analytic where possible, otherwise a fourth-order
  /// finite difference (k <= 4) with a step-halving check.
  Operator derivative(double t, int k) const;

  const std::variant<Constant, Commuting, General>& spec() const noexcept { return spec_; }

 private:
  GeneratorFamily(int dim, double horizon, std::variant<Constant, Commuting, General> spec);

  int dim_;
  double horizon_;
  std::variant<Constant, Commuting, General> spec_;
};

/// Strictly increasing points in [0, T], at least two of them.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(double first, double last, int count);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<double> points_;
};

enum class Method { MatrixExp, ExpOfIntegral, ODEIntegrate };

struct EvolutionConfig {
  double ode_step = 1e-3;
  double overflow_guard = 1e12;
  double integral_tol = 1e-12;
  /// Finite-difference base step as a fraction of the horizon; scaled by the derivative order.
  double fd_step_fraction = 1e-2;
  double fd_tol = 1e-5;
};

struct GrowthBound {
  double m = 1.0;
  double omega = 0.0;
};

/// Two-parameter family (t, s) -> U(t, s) generated by a GeneratorFamily.
/// Construction method follows the declared structure. Results are cached;
/// the cache is shared between copies and safe under concurrent use.
class EvolutionFamily {
 public:
  explicit EvolutionFamily(GeneratorFamily generator, EvolutionConfig cfg = {});

  const GeneratorFamily& generator() const noexcept { return generator_; }
  const EvolutionConfig& config() const noexcept { return cfg_; }
  Method method() const noexcept;
  int dim() const noexcept { return generator_.dim(); }
  double horizon() const noexcept { return generator_.horizon(); }

  /// U(t, s) for 0 <= s <= t <= T.
  Operator propagate(double t, double s) const;
  /// d^m/dt^m U(t, s), m in 1..4 (any m >= 1 for constant generators).
  Operator dt(double t, double s, int m) const;

  const std::optional<GrowthBound>& growth() const noexcept { return growth_; }
  void set_growth(GrowthBound g) { growth_ = g; }

 private:
  struct Cache {
    std::shared_mutex mutex;
    std::map<std::pair<double, double>, Operator> values;
  };

  Matrix compute(double t, double s) const;
  Matrix local_propagator(double from, double to, int steps) const;
  Matrix general_derivative(double t, double s, int m) const;

  GeneratorFamily generator_;
  EvolutionConfig cfg_;
  std::shared_ptr<Cache> cache_;
  std::optional<GrowthBound> growth_;
};

inline Operator propagate(const EvolutionFamily& ev, double t, double s) { return ev.propagate(t, s); }
inline Operator dt_evolution(const EvolutionFamily& ev, double t, double s, int m) { return ev.dt(t, s, m); }

/// |U(t, r) U(r, s) - U(t, s)| for s <= r <= t.
double check_semigroup(const EvolutionFamily& ev, double s, double r, double t);

/// Fits |U(t, s)| <= M exp(omega (t - s)) over all grid pairs and stores the
/// result in `ev`. Constant generators take omega as the spectral abscissa,
/// other structures a least-squares slope of log|U|; M is then the smallest
/// value >= 1 making the bound hold on the grid.
GrowthBound fit_growth_bound(EvolutionFamily& ev, const TimeGrid& grid);

struct ResolventEstimateReport {
  bool applicable = true;
  std::string note;
  /// Re(lambda) * |(lambda - (t - s) A)^{-1}| per sample.
  std::vector<double> ratios;
  /// Largest ratio over the samples.
  double fitted_c = 0.0;
  /// sup_{tau >= 0} |exp(tau A)|, the constant the resolvent bound predicts.
  double growth_constant = 0.0;
  bool passed = false;
};

ResolventEstimateReport resolvent_estimate_check(const GeneratorFamily& gen, double s, double t,
                                                 std::span<const Complex> lambdas);

}  // namespace opcalc::evolution
