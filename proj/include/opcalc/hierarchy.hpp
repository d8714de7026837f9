#pragma once

#include <map>
#include <memory>
#include <vector>

#include "opcalc/evolution.hpp"
#include "opcalc/logrep.hpp"

namespace opcalc::hierarchy {

using evolution::EvolutionFamily;
using evolution::GeneratorFamily;
using evolution::TimeGrid;
using logrep::DerivativeMode;
using logrep::LogrepConfig;

enum class Provenance { Recurrence, Factorization, LogProduct, AltLogProduct };

/// A_1(t), ..., A_n(t) built by A_k = dA_{k-1}/dt + A_1 A_{k-1}. Members are
/// evaluated on demand from the derivatives of A_1; a member may carry a
/// deliberate additive fault for harness sanity checks.
class OperatorFamilySeq {
 public:
  OperatorFamilySeq(GeneratorFamily generator, int order, Provenance provenance = Provenance::Recurrence);

  int order() const noexcept { return order_; }
  Provenance provenance() const noexcept { return provenance_; }
  int dim() const noexcept { return generator_->dim(); }
  double horizon() const noexcept { return generator_->horizon(); }
  const GeneratorFamily& generator() const noexcept { return *generator_; }

  /// A_k(t), k in 1..order.
  Operator member(int k, double t) const;
  /// A_1(t), ..., A_order(t) in one pass.
  std::vector<Operator> members(double t) const;

  /// Member k is returned as A_k + shift from now on.
  void inject_fault(int k, Operator shift);

 private:
  std::vector<Operator> evaluate(double t, int upto) const;

  std::shared_ptr<const GeneratorFamily> generator_;
  int order_;
  Provenance provenance_;
  std::map<int, Operator> faults_;
};

/// Highest order allowed when A_1 only has finite-difference derivatives.
inline constexpr int kFdOrderCap = 5;

/// dA_1/dt + A_1(t)^2.
Operator miura_second_order(const GeneratorFamily& gen, double t);

OperatorFamilySeq recurrence_build(const GeneratorFamily& gen, int n);

struct HierarchyReport {
  std::vector<double> grid;
  /// residuals[k - 1][i] = |d^k psi/dt^k - A_k psi| / |psi| at grid[i].
  std::vector<std::vector<double>> residuals;
  std::vector<Complex> kappas;
  /// Named distances between alternative constructions, when computed.
  std::map<std::string, double> cross_distances;
  bool commutation_met = true;

  double max_residual(int k) const;
  double max_residual() const;
};

/// psi(t) = U(t, s) x with s the first grid point; every order 1..n is
/// checked at every grid point. Grid points run concurrently.
HierarchyReport verify_nth_order(const OperatorFamilySeq& seq, const EvolutionFamily& ev, const TimeGrid& grid,
                                 const Vector& seed_vector);

/// prod_{k=1..n} (d^{k-1}U)^{-1} d^kU, k = 1 leftmost.
Operator factorize_product(const EvolutionFamily& ev, int n, double t, double s, const LinalgConfig& cfg = {});

/// prod_{k=1..n} (kappa U_k(s, t) + I) d/dt Log(U_k(t, s) + kappa I), where
/// U_k(t, s) = [d^{k-1}U(t, s)] [d^{k-1}U(s, s)]^{-1} is the family generated
/// by [d^kU][d^{k-1}U]^{-1}.
Operator log_product_representation(const EvolutionFamily& ev, int n, double t, double s, Complex kappa,
                                    DerivativeMode mode = DerivativeMode::Analytic, const LogrepConfig& cfg = {});

/// prod_{k=1..n} (I - kappa e^{-alpha_k})^{-1} d/dt alpha_k with alpha_k = Log(U_k(t, s) + kappa I).
Operator alt_log_product(const EvolutionFamily& ev, int n, double t, double s, Complex kappa,
                         DerivativeMode mode = DerivativeMode::Analytic, const LogrepConfig& cfg = {});

/// kappa = 1 + max rho(U_k(t, s)) over k = 1..n and grid pairs with s the first point.
Complex select_product_kappa(const EvolutionFamily& ev, int n, const TimeGrid& grid, const LinalgConfig& cfg = {});

/// exp(t a_n^{1/n}) with the principal n-th root.
Operator hille_yosida_gen(const Operator& a_n, int n, double t, const calc::CalcConfig& cfg = {});

struct RootCheck {
  bool in_sector = false;
  /// |R^n - a_n| / (1 + |a_n|) with R = principal_root(a_n, n).
  double power_residual = 0.0;
  /// |principal_root(A^n, n) - A|; asserted only when in_sector.
  double roundtrip_error = 0.0;
};

RootCheck fractional_power_roundtrip(const Operator& a, int n, const calc::CalcConfig& cfg = {});

/// |left-to-right product - right-to-left product| of the factorization factors.
double ordering_sensitivity(const EvolutionFamily& ev, int n, double t, double s, const LinalgConfig& cfg = {});

/// |[d^kU][d^{k-1}U]^{-1} - [d^{k-1}U]^{-1}[d^kU]|, the two written forms of A_k.
double factor_form_discrepancy(const EvolutionFamily& ev, int k, double t, double s, const LinalgConfig& cfg = {});

}  // namespace opcalc::hierarchy
