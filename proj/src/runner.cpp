#include "opcalc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "opcalc/evolution.hpp"
#include "opcalc/hierarchy.hpp"
#include "opcalc/io.hpp"
#include "opcalc/logrep.hpp"
#include "opcalc/spectral_pde.hpp"

#ifndef OPCALC_VERSION
#define OPCALC_VERSION "unknown"
#endif

namespace opcalc::runner {

namespace {

using evolution::EvolutionFamily;
using evolution::GeneratorFamily;
using evolution::TimeGrid;
using logrep::DerivativeMode;

constexpr const char* kRngName = "mt19937_64";

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

// ---------------------------------------------------------------------------
// Random inputs

struct Rng {
  std::mt19937_64 engine;
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
};

std::vector<Complex> random_spectrum(Rng& rng, int d, double re_lo, double re_hi, double im_lo, double im_hi) {
  std::vector<Complex> ev;
  for (int i = 0; i < d; ++i) ev.emplace_back(rng.uniform(re_lo, re_hi), rng.uniform(im_lo, im_hi));
  return ev;
}

Matrix random_matrix(Rng& rng, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  return m;
}

Matrix diag_matrix(const std::vector<Complex>& ev) {
  Vector v(static_cast<Eigen::Index>(ev.size()));
  for (std::size_t i = 0; i < ev.size(); ++i) v(static_cast<Eigen::Index>(i)) = ev[i];
  return v.asDiagonal();
}

Operator random_normal(Rng& rng, const std::vector<Complex>& ev) {
  const int d = static_cast<int>(ev.size());
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(rng, d)).householderQ();
  return Operator(q * diag_matrix(ev) * q.adjoint());
}

Operator random_diagonalizable(Rng& rng, const std::vector<Complex>& ev) {
  const int d = static_cast<int>(ev.size());
  const Matrix v = Matrix::Identity(d, d) + 0.3 * random_matrix(rng, d);
  return Operator(v * diag_matrix(ev) * v.inverse());
}

json matrix_json(const Operator& m) { return io::to_json(m); }

double rel_err(const Matrix& got, const Matrix& want) {
  return norm2(Matrix(got - want)) / std::max(norm2(want), 1e-12);
}

Matrix power(const Matrix& a, int n) {
  Matrix p = a;
  for (int k = 1; k < n; ++k) p = a * p;
  return p;
}

// ---------------------------------------------------------------------------
// Cases

struct Context {
  const CampaignConfig& cfg;
  Rng rng;
};

struct Outcome {
  json inputs = json::object();
  std::vector<Residual> residuals;
  std::string note;
};

struct Case {
  CaseInfo info;
  double tolerance;
  std::function<Outcome(Context&)> run;
};

Outcome recovery_case(Context& ctx, bool commuting, DerivativeMode mode) {
  Outcome out;
  GeneratorFamily gen = GeneratorFamily::constant(Operator::identity(1));
  if (commuting) {
    const Operator base = Operator::diagonal({1.0, 2.0});
    gen = GeneratorFamily::commuting(expr::Expr::parse("t"), base, 1.0);
    out.inputs = {{"profile", "t"}, {"base", matrix_json(base)}};
  } else {
    const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, -1.0, 1.0, -1.0, 1.0));
    gen = GeneratorFamily::constant(a, 1.0);
    out.inputs = {{"matrix", matrix_json(a)}};
  }
  const EvolutionFamily ev(gen);
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 11);
  const Complex kappa = logrep::select_kappa(ev, grid);
  const Complex kappa2 = kappa + 1.5;
  double alt = 0.0, orig = 0.0, cross = 0.0, indep = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid.points()[i];
    const Matrix truth = gen(t).mat();
    const Matrix ra = logrep::recover_generator_alt(ev, t, 0.0, kappa, mode).mat();
    const Matrix ro = logrep::recover_generator_original(ev, t, 0.0, kappa, mode).mat();
    const Matrix rb = logrep::recover_generator_alt(ev, t, 0.0, kappa2, mode).mat();
    alt = std::max(alt, rel_err(ra, truth));
    orig = std::max(orig, rel_err(ro, truth));
    cross = std::max(cross, rel_err(ra, ro));
    indep = std::max(indep, rel_err(rb, ra));
  }
  out.inputs["kappa"] = kappa.real();
  out.inputs["mode"] = mode == DerivativeMode::Analytic ? "analytic" : "finite-difference";
  out.residuals = {{"alt_rel_error", alt}, {"original_rel_error", orig}, {"formula_disagreement", cross},
                   {"kappa_dependence", indep}};
  return out;
}

Outcome cp2_case(Context& ctx, const GeneratorFamily& gen, int n, json inputs) {
  Outcome out;
  const EvolutionFamily ev(gen);
  hierarchy::OperatorFamilySeq seq = hierarchy::recurrence_build(gen, n);
  if (ctx.cfg.fault && ctx.cfg.fault->member <= n) {
    seq.inject_fault(ctx.cfg.fault->member, scale(Operator::identity(gen.dim()), ctx.cfg.fault->shift));
    out.note = "fault injected into member " + std::to_string(ctx.cfg.fault->member);
  }
  const TimeGrid grid = TimeGrid::uniform(0.0, gen.horizon(), 10);
  Vector x(gen.dim());
  for (int i = 0; i < gen.dim(); ++i) x(i) = Complex(ctx.rng.uniform(-1.0, 1.0), ctx.rng.uniform(-1.0, 1.0));
  const hierarchy::HierarchyReport rep = hierarchy::verify_nth_order(seq, ev, grid, x);
  for (int k = 1; k <= n; ++k) out.residuals.push_back({"order_" + std::to_string(k), rep.max_residual(k)});
  inputs["order"] = n;
  out.inputs = std::move(inputs);
  if (!rep.commutation_met) out.note += (out.note.empty() ? "" : "; ") + std::string("commutation hypothesis unmet");
  return out;
}

Outcome representation_case(Context& ctx, int which) {
  Outcome out;
  const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, 1.0, 3.0, -1.0, 1.0));
  const EvolutionFamily ev(GeneratorFamily::constant(a, 1.0));
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 5);
  out.inputs = {{"matrix", matrix_json(a)}};
  for (int n = 1; n <= 3; ++n) {
    const Complex kappa = hierarchy::select_product_kappa(ev, n, grid);
    const hierarchy::OperatorFamilySeq seq = hierarchy::recurrence_build(ev.generator(), n);
    double worst = 0.0;
    double cross = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double t = grid.points()[i];
      const Matrix rec = seq.member(n, t).mat();
      Matrix got;
      if (which == 0) {
        got = hierarchy::factorize_product(ev, n, t, 0.0).mat();
      } else if (which == 1) {
        got = hierarchy::log_product_representation(ev, n, t, 0.0, kappa).mat();
        cross = std::max(cross, rel_err(got, hierarchy::factorize_product(ev, n, t, 0.0).mat()));
      } else {
        got = hierarchy::alt_log_product(ev, n, t, 0.0, kappa).mat();
        cross = std::max(cross, rel_err(got, hierarchy::log_product_representation(ev, n, t, 0.0, kappa).mat()));
      }
      worst = std::max(worst, rel_err(got, rec));
    }
    out.residuals.push_back({"vs_recurrence_n" + std::to_string(n), worst});
    if (which != 0) out.residuals.push_back({"vs_previous_form_n" + std::to_string(n), cross});
  }
  return out;
}

Outcome pde_case(int k, int order, const std::string& initial) {
  Outcome out;
  pde::PDEScenario sc;
  sc.grid = pde::PeriodicGrid(32, 2.0 * std::numbers::pi);
  sc.k = k;
  sc.order = order;
  sc.initial = pde::sample_initial(sc.grid, initial);
  sc.horizon = 1.0;
  sc.timesteps = 10;
  const pde::ExampleReport rep = pde::example_residuals(sc);
  double op = 0.0;
  double literal = 0.0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    op = std::max(op, rep.operator_residual[i] / std::max(rep.solution_norm[i], 1e-300));
    literal = std::max(literal, rep.literal_residual[i] / std::max(rep.solution_norm[i], 1e-300));
  }
  out.inputs = {{"N", 32}, {"k", k}, {"order", order}, {"initial", initial}, {"T", 1.0}, {"timesteps", 10}};
  out.residuals = {{"operator_residual_rel", op}};
  std::ostringstream note;
  note << std::setprecision(6) << "literal mixed-derivative reading leaves " << literal << " relative (reported only)";
  out.note = note.str();
  return out;
}

const std::vector<Case>& builtin_cases() {
  static const std::vector<Case> cases = [] {
    std::vector<Case> v;

    // logrep ---------------------------------------------------------------
    v.push_back({{"logrep/scalar-recovery", "logrep", "Eq. (altrep)", "A = 1 (scalar), s = 0, t = 1, kappa = 1",
                  "both recovery formulas return 1; d/dt a = e/(e+1)"},
                 1e-9, [](Context&) {
                   Outcome out;
                   const EvolutionFamily ev(GeneratorFamily::constant(Operator::scalar(1.0), 1.0));
                   const double e = std::numbers::e;
                   const Complex alt = logrep::recover_generator_alt(ev, 1.0, 0.0, 1.0)(0, 0);
                   const Complex orig = logrep::recover_generator_original(ev, 1.0, 0.0, 1.0)(0, 0);
                   const Complex da = logrep::dt_alt_generator(ev, 1.0, 0.0, 1.0)(0, 0);
                   out.inputs = {{"A", 1.0}, {"t", 1.0}, {"s", 0.0}, {"kappa", 1.0}};
                   out.residuals = {{"alt_error", std::abs(alt - 1.0)},
                                    {"original_error", std::abs(orig - 1.0)},
                                    {"dt_a_error", std::abs(da - e / (e + 1.0))}};
                   return out;
                 }});
    v.push_back({{"logrep/nongroup-scalar", "logrep", "Eq. (altrep), non-group remark",
                  "U = e (scalar), kappa in {1, 0}",
                  "|e^{-a(t,s)} - e^{a(s,t)}| = |1/(e+1) - (1/e + 1)| at kappa = 1, and 0 at kappa = 0"},
                 1e-12, [](Context&) {
                   Outcome out;
                   const EvolutionFamily ev(GeneratorFamily::constant(Operator::scalar(1.0), 1.0));
                   const double e = std::numbers::e;
                   const double d1 = logrep::nongroup_discrepancy(ev, 1.0, 0.0, 1.0);
                   const double d0 = logrep::nongroup_discrepancy(ev, 1.0, 0.0, 0.0);
                   const double expected = std::abs(1.0 / (e + 1.0) - (1.0 / e + 1.0));
                   out.inputs = {{"U", "e"}, {"kappa", {1.0, 0.0}}};
                   out.residuals = {{"kappa1_error", std::abs(d1 - expected)},
                                    {"kappa1_below_0.1", std::max(0.0, 0.1 - d1)},
                                    {"kappa0_discrepancy", d0}};
                   return out;
                 }});
    v.push_back({{"logrep/random-constant-analytic", "logrep", "Eq. (mastart)",
                  "seeded normal 4x4 A, spectrum in [-1,1]x[-1,1]i, 10 grid times in (0, 1]",
                  "both formulas recover A to 1e-6 with analytic d/dt, agree with each other, kappa-independent"},
                 1e-6, [](Context& ctx) { return recovery_case(ctx, false, DerivativeMode::Analytic); }});
    v.push_back({{"logrep/random-constant-fd", "logrep", "Eq. (mastart)", "as random-constant-analytic",
                  "recovery to 1e-4 with finite-difference d/dt"},
                 1e-4, [](Context& ctx) { return recovery_case(ctx, false, DerivativeMode::FiniteDifference); }});
    v.push_back({{"logrep/commuting-analytic", "logrep", "Eq. (altrep)", "A_1(t) = t diag(1, 2), t in (0, 1]",
                  "both formulas recover t diag(1, 2) to 1e-6"},
                 1e-6, [](Context& ctx) { return recovery_case(ctx, true, DerivativeMode::Analytic); }});
    v.push_back({{"logrep/commuting-fd", "logrep", "Eq. (altrep)", "as commuting-analytic",
                  "recovery to 1e-4 with finite-difference d/dt"},
                 1e-4, [](Context& ctx) { return recovery_case(ctx, true, DerivativeMode::FiniteDifference); }});
    v.push_back({{"logrep/consistency", "logrep", "Eq. (altrep), consistency",
                  "seeded normal 4x4 A, t = 0.7, s = 0",
                  "|A - (I - kappa e^{-a})^{-1} A (I - kappa e^{-a})| <= 1e-8"},
                 1e-8, [](Context& ctx) {
                   Outcome out;
                   const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, -1.0, 1.0, -1.0, 1.0));
                   const EvolutionFamily ev(GeneratorFamily::constant(a, 1.0));
                   const Complex kappa = logrep::select_kappa(ev, TimeGrid::uniform(0.0, 1.0, 5));
                   out.inputs = {{"matrix", matrix_json(a)}, {"kappa", kappa.real()}};
                   out.residuals = {{"consistency", logrep::consistency_residual(ev, 0.7, 0.0, kappa)}};
                   return out;
                 }});
    v.push_back({{"logrep/dt-log-identity", "logrep", "Log-derivative identity",
                  "Constant diag(1, -1) and commuting (1 + t) B with seeded B; seeded x",
                  "|[d/dt Log(U + kappa I)] x - (U + kappa I)^{-1} A U x| / |x| <= 1e-6"},
                 1e-6, [](Context& ctx) {
                   Outcome out;
                   const Operator b = random_normal(ctx.rng, random_spectrum(ctx.rng, 3, -1.0, 1.0, -1.0, 1.0));
                   const std::vector<GeneratorFamily> gens{
                       GeneratorFamily::constant(Operator::diagonal({1.0, -1.0}), 1.0),
                       GeneratorFamily::commuting(expr::Expr::parse("1 + t"), b, 1.0)};
                   double worst = 0.0;
                   for (const auto& gen : gens) {
                     const EvolutionFamily ev(gen);
                     const Complex kappa = logrep::select_kappa(ev, TimeGrid::uniform(0.0, 1.0, 5));
                     Vector x(gen.dim());
                     for (int i = 0; i < gen.dim(); ++i) x(i) = Complex(ctx.rng.uniform(-1, 1), ctx.rng.uniform(-1, 1));
                     for (double t : {0.25, 0.5, 1.0}) {
                       worst = std::max(worst, logrep::dt_log_identity_check(ev, t, 0.0, kappa, x));
                     }
                   }
                   out.inputs = {{"base", matrix_json(b)}};
                   out.residuals = {{"identity_residual", worst}};
                   return out;
                 }});
    v.push_back({{"logrep/resolvent-estimate", "logrep", "Resolvent estimate",
                  "seeded 4x4 A with spectrum in Re < 0, 20 seeded lambda with Re > 0, t - s = 1",
                  "Re(lambda) |(lambda - A)^{-1}| never exceeds sup |exp(tau A)|"},
                 0.0, [](Context& ctx) {
                   Outcome out;
                   const Operator a =
                       random_diagonalizable(ctx.rng, random_spectrum(ctx.rng, 4, -3.0, -0.5, -1.0, 1.0));
                   std::vector<Complex> lambdas;
                   for (int i = 0; i < 20; ++i) lambdas.emplace_back(ctx.rng.uniform(0.05, 5.0), ctx.rng.uniform(-5, 5));
                   const auto rep = evolution::resolvent_estimate_check(GeneratorFamily::constant(a, 1.0), 0.0, 1.0,
                                                                        lambdas);
                   out.inputs = {{"matrix", matrix_json(a)}};
                   out.residuals = {{"excess_over_bound", std::max(0.0, rep.fitted_c - rep.growth_constant * (1 + 1e-9))},
                                    {"not_applicable", rep.applicable ? 0.0 : 1.0}};
                   out.note = "fitted C " + std::to_string(rep.fitted_c) + ", sup |exp(tau A)| " +
                              std::to_string(rep.growth_constant);
                   return out;
                 }});

    // hierarchy ------------------------------------------------------------
    v.push_back({{"hierarchy/constant-powers", "hierarchy", "Eq. (recc)",
                  "seeded normal 4x4 A, n = 8", "recurrence members are A, A^2, ..., A^8"},
                 1e-12, [](Context& ctx) {
                   Outcome out;
                   const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, -1.0, 1.0, -1.0, 1.0));
                   const auto members = hierarchy::recurrence_build(GeneratorFamily::constant(a), 8).members(0.3);
                   double worst = 0.0;
                   for (int k = 1; k <= 8; ++k) {
                     const Matrix want = power(a.mat(), k);
                     worst = std::max(worst, norm2(Matrix(members[static_cast<std::size_t>(k - 1)].mat() - want)) /
                                                 std::max(1.0, norm2(want)));
                   }
                   out.inputs = {{"matrix", matrix_json(a)}, {"order", 8}};
                   out.residuals = {{"max_power_deviation", worst}};
                   return out;
                 }});
    v.push_back({{"hierarchy/scalar-commuting", "hierarchy", "Eq. (recc)", "A_1(t) = t (scalar), t in [0, 2]",
                  "A_2 = 1 + t^2, A_3 = 3t + t^3, second member equals f' + f^2"},
                 1e-10, [](Context&) {
                   Outcome out;
                   const GeneratorFamily gen =
                       GeneratorFamily::commuting(expr::Expr::parse("t"), Operator::scalar(1.0), 2.0);
                   const auto seq = hierarchy::recurrence_build(gen, 3);
                   double e2 = 0.0, e3 = 0.0, miura = 0.0;
                   for (int i = 0; i <= 8; ++i) {
                     const double t = 0.25 * i;
                     const auto m = seq.members(t);
                     e2 = std::max(e2, std::abs(m[1](0, 0) - (1.0 + t * t)));
                     e3 = std::max(e3, std::abs(m[2](0, 0) - (3.0 * t + t * t * t)));
                     miura = std::max(miura, std::abs(hierarchy::miura_second_order(gen, t)(0, 0) - (1.0 + t * t)));
                   }
                   out.inputs = {{"profile", "t"}, {"base", 1.0}};
                   out.residuals = {{"A2_error", e2}, {"A3_error", e3}, {"riccati_error", miura}};
                   return out;
                 }});
    v.push_back({{"hierarchy/cp2-constant", "hierarchy", "Eq. (cp2)", "seeded normal 4x4 A, n = 4, 10 grid times",
                  "psi = U(t, 0) x solves d^k psi = A_k psi for k = 1..4"},
                 1e-10, [](Context& ctx) {
                   const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, -1.0, 1.0, -1.0, 1.0));
                   return cp2_case(ctx, GeneratorFamily::constant(a, 1.0), 4, {{"matrix", matrix_json(a)}});
                 }});
    v.push_back({{"hierarchy/cp2-commuting", "hierarchy", "Eq. (cp2)", "A_1(t) = t diag(1, 2), n = 3, 10 grid times",
                  "psi = U(t, 0) x solves d^k psi = A_k psi for k = 1..3"},
                 1e-5, [](Context& ctx) {
                   const Operator b = Operator::diagonal({1.0, 2.0});
                   return cp2_case(ctx, GeneratorFamily::commuting(expr::Expr::parse("t"), b, 1.0), 3,
                                   {{"profile", "t"}, {"base", matrix_json(b)}});
                 }});

    // factorization --------------------------------------------------------
    v.push_back({{"factorization/recx3", "factorization", "Eq. (recx3)",
                  "seeded normal 4x4 A, spectrum in [1,3]x[-1,1]i, n = 1..3",
                  "ordered factor product equals the recurrence member A^n"},
                 1e-6, [](Context& ctx) { return representation_case(ctx, 0); }});
    v.push_back({{"factorization/repu", "factorization", "Eq. (repu)", "as recx3, kappa from the factor families",
                  "product of logarithmic representations equals A^n and the factorization"},
                 1e-6, [](Context& ctx) { return representation_case(ctx, 1); }});
    v.push_back({{"factorization/repalt", "factorization", "Eq. (repalt)", "as repu",
                  "alternative-generator product equals A^n and the log product"},
                 1e-6, [](Context& ctx) { return representation_case(ctx, 2); }});
    v.push_back({{"factorization/nilpotent", "factorization", "Eq. (recx3)", "A = [[0, 1], [0, 0]], n = 2",
                  "factorization refuses with SingularDerivative at k = 2"},
                 0.0, [](Context&) {
                   Outcome out;
                   Matrix a = Matrix::Zero(2, 2);
                   a(0, 1) = 1.0;
                   const EvolutionFamily ev(GeneratorFamily::constant(Operator(a), 1.0));
                   double missing = 1.0;
                   try {
                     hierarchy::factorize_product(ev, 2, 1.0, 0.0);
                     out.note = "no error raised";
                   } catch (const Error& e) {
                     if (e.code() == Errc::SingularDerivative && e.value() == 2.0) missing = 0.0;
                     out.note = e.what();
                   }
                   out.inputs = {{"matrix", matrix_json(Operator(a))}, {"order", 2}};
                   out.residuals = {{"expected_error_missing", missing}};
                   return out;
                 }});
    v.push_back({{"factorization/ordering", "factorization", "Eq. (recx3), ordering",
                  "seeded normal 4x4 A, n = 3, t = 0.6",
                  "reversed factor order and the two written forms of A_k agree for constant A"},
                 1e-8, [](Context& ctx) {
                   Outcome out;
                   const Operator a = random_normal(ctx.rng, random_spectrum(ctx.rng, 4, 1.0, 3.0, -1.0, 1.0));
                   const EvolutionFamily ev(GeneratorFamily::constant(a, 1.0));
                   const double scale_n = std::max(1.0, norm2(power(a.mat(), 3)));
                   double forms = 0.0;
                   for (int k = 1; k <= 3; ++k) {
                     forms = std::max(forms, hierarchy::factor_form_discrepancy(ev, k, 0.6, 0.0) / std::max(1.0, norm2(a)));
                   }
                   out.inputs = {{"matrix", matrix_json(a)}};
                   out.residuals = {{"ordering_sensitivity", hierarchy::ordering_sensitivity(ev, 3, 0.6, 0.0) / scale_n},
                                    {"factor_form_discrepancy", forms}};
                   return out;
                 }});

    // hygen ----------------------------------------------------------------
    v.push_back({{"hygen/root-roundtrip", "hygen", "Eq. (hy-gen)",
                  "seeded diagonalizable 4x4 A, spectrum in [1,3]x[-0.5,0.5]i, n in {2, 3}",
                  "principal_root(A^n, n) = A and R^n = A^n"},
                 1e-8, [](Context& ctx) {
                   Outcome out;
                   const Operator a = random_diagonalizable(ctx.rng, random_spectrum(ctx.rng, 4, 1.0, 3.0, -0.5, 0.5));
                   double trip = 0.0, pw = 0.0, sector = 0.0;
                   for (int n : {2, 3}) {
                     const auto rc = hierarchy::fractional_power_roundtrip(a, n);
                     trip = std::max(trip, rc.roundtrip_error / std::max(1.0, norm2(a)));
                     pw = std::max(pw, rc.power_residual);
                     if (!rc.in_sector) sector = 1.0;
                   }
                   out.inputs = {{"matrix", matrix_json(a)}};
                   out.residuals = {{"roundtrip_error", trip}, {"power_residual", pw}, {"outside_sector", sector}};
                   return out;
                 }});
    v.push_back({{"hygen/propagate-match", "hygen", "Eq. (hy-gen)",
                  "as root-roundtrip, t in [0, 1] at 11 points",
                  "exp(t (A^n)^{1/n}) equals the constant-generator propagator"},
                 1e-8, [](Context& ctx) {
                   Outcome out;
                   const Operator a = random_diagonalizable(ctx.rng, random_spectrum(ctx.rng, 4, 1.0, 3.0, -0.5, 0.5));
                   const EvolutionFamily ev(GeneratorFamily::constant(a, 1.0));
                   double worst = 0.0;
                   for (int n : {2, 3}) {
                     const Operator a_n(power(a.mat(), n));
                     for (int i = 0; i <= 10; ++i) {
                       const double t = 0.1 * i;
                       const Matrix u = ev.propagate(t, 0.0).mat();
                       const Matrix g = hierarchy::hille_yosida_gen(a_n, n, t).mat();
                       worst = std::max(worst, norm2(Matrix(g - u)) / std::max(1.0, norm2(u)));
                     }
                   }
                   out.inputs = {{"matrix", matrix_json(a)}};
                   out.residuals = {{"propagator_mismatch", worst}};
                   return out;
                 }});
    v.push_back({{"hygen/outside-sector", "hygen", "Eq. (hy-gen), principal branch",
                  "A = diag(-1 + 0.5i, 2), n = 2",
                  "sector test reports the branch mismatch; R^2 = A^2 still holds"},
                 1e-8, [](Context&) {
                   Outcome out;
                   const Operator a = Operator::diagonal({Complex(-1.0, 0.5), 2.0});
                   const auto rc = hierarchy::fractional_power_roundtrip(a, 2);
                   out.inputs = {{"matrix", matrix_json(a)}, {"order", 2}};
                   out.residuals = {{"sector_misreported", rc.in_sector ? 1.0 : 0.0},
                                    {"power_residual", rc.power_residual}};
                   out.note = "principal root differs from A by " + std::to_string(rc.roundtrip_error);
                   return out;
                 }});

    // pde ------------------------------------------------------------------
    v.push_back({{"pde/example1-k1", "pde", "Eq. (evo02)", "N = 32, k = 1, n = 2, u0 = sin(x), T = 1",
                  "d^2u/dt^2 = A_2 u with A_2 = D^2 from the recurrence, relative to |u|"},
                 1e-8, [](Context&) { return pde_case(1, 2, "sin(x)"); }});
    v.push_back({{"pde/example1-k2", "pde", "Eq. (evo02)", "N = 32, k = 2, n = 2, u0 = sin(x) + cos(2x)/2, T = 1",
                  "d^2u/dt^2 = D^4 u, relative to |u|"},
                 1e-8, [](Context&) { return pde_case(2, 2, "sin(x) + cos(2*x)/2"); }});
    v.push_back({{"pde/example2-k1", "pde", "Eq. (recc), third order", "N = 32, k = 1, n = 3, u0 = sin(x), T = 1",
                  "d^3u/dt^3 = D^3 u, relative to |u|"},
                 1e-8, [](Context&) { return pde_case(1, 3, "sin(x)"); }});
    v.push_back({{"pde/example2-k2", "pde", "Eq. (recc), third order",
                  "N = 32, k = 2, n = 3, u0 = sin(x) + cos(2x)/2, T = 1", "d^3u/dt^3 = D^6 u, relative to |u|"},
                 1e-8, [](Context&) { return pde_case(2, 3, "sin(x) + cos(2*x)/2"); }});
    v.push_back({{"pde/literal-reading", "pde", "Eq. (evo02), literal reading",
                  "N = 32, k = 1, n = 2, u0 = sin(x), T = 1",
                  "commuting-partials reading leaves exactly |D^2 u|; the mismatch to that value is checked"},
                 1e-6, [](Context&) {
                   Outcome out;
                   pde::PDEScenario sc;
                   sc.grid = pde::PeriodicGrid(32, 2.0 * std::numbers::pi);
                   sc.initial = pde::sample_initial(sc.grid, "sin(x)");
                   const auto rep = pde::example_residuals(sc);
                   double worst = 0.0;
                   for (std::size_t i = 0; i < rep.times.size(); ++i) {
                     worst = std::max(worst, std::abs(rep.literal_residual[i] - rep.literal_expected[i]) /
                                                 rep.literal_expected[i]);
                   }
                   out.inputs = {{"N", 32}, {"k", 1}, {"order", 2}, {"initial", "sin(x)"}, {"T", 1.0}};
                   out.residuals = {{"literal_vs_D2u_rel", worst}};
                   out.note = "literal residual is nonzero by construction and is reported as a finding";
                   return out;
                 }});
    v.push_back({{"pde/substitution", "pde", "Eq. (evo02), substitution",
                  "N = 32, k in {1, 2}, n in {2, 3}, u0 = sin(x) + cos(2x)/2, t in {0, 0.5, 1}",
                  "per-mode substitution u^{-1} du/dt for the spatial operator satisfies the equation"},
                 1e-10, [](Context&) {
                   Outcome out;
                   double worst = 0.0;
                   int checked = 0;
                   for (int k : {1, 2}) {
                     for (int n : {2, 3}) {
                       pde::PDEScenario sc;
                       sc.grid = pde::PeriodicGrid(32, 2.0 * std::numbers::pi);
                       sc.k = k;
                       sc.order = n;
                       sc.initial = pde::sample_initial(sc.grid, "sin(x) + cos(2*x)/2");
                       for (double t : {0.0, 0.5, 1.0}) {
                         const auto rep = pde::verify_operator_substitution(sc, t);
                         worst = std::max(worst, rep.max_residual);
                         for (const auto& m : rep.modes) checked += m.skipped ? 0 : 1;
                       }
                     }
                   }
                   out.inputs = {{"N", 32}, {"initial", "sin(x) + cos(2*x)/2"}};
                   out.residuals = {{"max_mode_residual", worst}};
                   out.note = std::to_string(checked) + " mode checks";
                   return out;
                 }});
    return v;
  }();
  return cases;
}

// Cases generated from fixture files named in the config.
std::vector<Case> fixture_cases(const CampaignConfig& cfg) {
  std::vector<Case> v;
  for (const auto& path : cfg.generators) {
    const std::string stem = path.stem().string();
    const json spec = io::read_json_file(path);
    const GeneratorFamily gen = io::generator_from_json(spec);
    const bool constant = gen.structure() == evolution::Structure::Constant;
    const int n = constant ? 4 : 3;
    v.push_back({{"hierarchy/fixture:" + stem, "hierarchy", "Eq. (cp2)", path.filename().string(),
                  "fixture solution solves orders 1.." + std::to_string(n)},
                 constant ? 1e-10 : 1e-5, [gen, spec, n](Context& ctx) { return cp2_case(ctx, gen, n, spec); }});
    if (constant) {
      v.push_back({{"hierarchy/fixture:" + stem + "/powers", "hierarchy", "Eq. (recc)", path.filename().string(),
                    "recurrence members are powers of the fixture matrix"},
                   1e-12, [gen, spec](Context&) {
                     Outcome out;
                     const Matrix a = gen(0.0).mat();
                     const auto members = hierarchy::recurrence_build(gen, 4).members(0.0);
                     double worst = 0.0;
                     for (int k = 1; k <= 4; ++k) {
                       const Matrix want = power(a, k);
                       worst = std::max(worst, norm2(Matrix(members[static_cast<std::size_t>(k - 1)].mat() - want)) /
                                                   std::max(1.0, norm2(want)));
                     }
                     out.inputs = spec;
                     out.residuals = {{"max_power_deviation", worst}};
                     return out;
                   }});
    }
    if (gen.structure() != evolution::Structure::General) {
      v.push_back({{"logrep/fixture:" + stem, "logrep", "Eq. (altrep)", path.filename().string(),
                    "recovery of the fixture generator at 5 grid times"},
                   1e-6, [gen, spec](Context&) {
                     Outcome out;
                     const EvolutionFamily ev(gen);
                     const TimeGrid grid = TimeGrid::uniform(0.0, gen.horizon(), 6);
                     const Complex kappa = logrep::select_kappa(ev, grid);
                     double alt = 0.0, orig = 0.0;
                     for (std::size_t i = 1; i < grid.size(); ++i) {
                       const double t = grid.points()[i];
                       const Matrix truth = gen(t).mat();
                       alt = std::max(alt, rel_err(logrep::recover_generator_alt(ev, t, 0.0, kappa).mat(), truth));
                       orig = std::max(orig,
                                       rel_err(logrep::recover_generator_original(ev, t, 0.0, kappa).mat(), truth));
                     }
                     out.inputs = spec;
                     out.residuals = {{"alt_rel_error", alt}, {"original_rel_error", orig}};
                     return out;
                   }});
    }
  }
  for (const auto& path : cfg.scenarios) {
    const std::string stem = path.stem().string();
    const json spec = io::read_json_file(path);
    const pde::PDEScenario sc = pde::scenario_from_json(spec);
    v.push_back({{"pde/scenario:" + stem, "pde", "Eq. (evo02)", path.filename().string(),
                  "operator-reading residual relative to |u| and per-mode substitution at T"},
                 1e-8, [sc, spec](Context&) {
                   Outcome out;
                   const auto rep = pde::example_residuals(sc);
                   double op = 0.0;
                   for (std::size_t i = 0; i < rep.times.size(); ++i) {
                     op = std::max(op, rep.operator_residual[i] / std::max(rep.solution_norm[i], 1e-300));
                   }
                   out.inputs = spec;
                   out.residuals = {{"operator_residual_rel", op},
                                    {"max_mode_residual", pde::verify_operator_substitution(sc, sc.horizon).max_residual}};
                   return out;
                 }});
  }
  return v;
}

Record execute(const Case& c, const CampaignConfig& cfg) {
  Record rec;
  rec.suite = c.info.suite;
  rec.case_id = c.info.id;
  rec.anchor = c.info.anchor;
  rec.tolerance = c.tolerance;
  if (auto it = cfg.tolerances.find(c.info.id); it != cfg.tolerances.end()) rec.tolerance = it->second;

  Context ctx{cfg, Rng{std::mt19937_64(cfg.seed ^ fnv1a(c.info.id))}};
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome out = c.run(ctx);
    rec.inputs_digest = fnv1a_hex(out.inputs.dump());
    rec.residuals = std::move(out.residuals);
    rec.note = std::move(out.note);
    rec.passed = !rec.residuals.empty() &&
                 std::all_of(rec.residuals.begin(), rec.residuals.end(),
                             [&](const Residual& r) { return r.value <= rec.tolerance; });
  } catch (const Error& e) {
    rec.inputs_digest = fnv1a_hex(c.info.inputs);
    rec.passed = false;
    rec.note = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) config_error("cannot write " + path.string());
  f << text;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text);
  return os.str();
}

CampaignConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) config_error("config root must be an object");
  static const std::set<std::string> known{"seed",      "tolerances", "output_dir",     "suites",
                                           "generators", "scenarios",  "fault_injection"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) config_error("unknown field '" + key + "'");
  }

  CampaignConfig cfg;
  if (!j.contains("seed") || !j.at("seed").is_number_integer()) config_error("field 'seed' must be an integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) config_error("field 'tolerances' must map case ids to numbers");
    for (const auto& [id, value] : t.items()) {
      if (!value.is_number() || !(value.get<double>() >= 0.0)) {
        config_error("field 'tolerances." + id + "' must be a nonnegative number");
      }
      cfg.tolerances[id] = value.get<double>();
    }
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) config_error("field 'output_dir' must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }

  std::vector<std::string> suites{"all"};
  if (j.contains("suites")) {
    const json& s = j.at("suites");
    if (!s.is_array() || s.empty()) config_error("field 'suites' must be a nonempty array");
    suites.clear();
    for (const auto& name : s) {
      if (!name.is_string()) config_error("field 'suites' entries must be strings");
      suites.push_back(name.get<std::string>());
    }
  }
  for (const auto& name : suites) {
    if (name == "all") {
      cfg.suites = suite_names();
    } else if (suite_names().contains(name)) {
      cfg.suites.insert(name);
    } else {
      config_error("field 'suites': unknown suite '" + name + "'");
    }
  }

  const auto paths = [&](const char* field, std::vector<std::filesystem::path>& out) {
    if (!j.contains(field)) return;
    if (!j.at(field).is_array()) config_error(std::string("field '") + field + "' must be an array of paths");
    for (const auto& p : j.at(field)) {
      if (!p.is_string()) config_error(std::string("field '") + field + "' entries must be strings");
      std::filesystem::path path = p.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      if (!std::filesystem::exists(path)) config_error(std::string("field '") + field + "': missing " + path.string());
      out.push_back(path);
    }
  };
  paths("generators", cfg.generators);
  paths("scenarios", cfg.scenarios);

  if (j.contains("fault_injection")) {
    const json& f = j.at("fault_injection");
    if (!f.is_object() || !f.contains("member") || !f.at("member").is_number_integer() ||
        f.at("member").get<int>() < 1) {
      config_error("field 'fault_injection' needs an integer 'member' >= 1");
    }
    FaultInjection fault;
    fault.member = f.at("member").get<int>();
    fault.shift = f.value("shift", 1.0);
    cfg.fault = fault;
  }
  cfg.digest = fnv1a_hex(j.dump());
  return cfg;
}

CampaignConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& suite_override,
                           const std::optional<std::filesystem::path>& out_override) {
  std::ifstream f(path);
  if (!f) config_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
  if (!suite_override.empty() && j.is_object()) j["suites"] = suite_override;
  CampaignConfig cfg = parse_config(j, path.parent_path());
  if (out_override) cfg.output_dir = *out_override;

  // Fixture files must load before anything runs.
  try {
    for (const auto& g : cfg.generators) io::generator_from_json(io::read_json_file(g));
    for (const auto& s : cfg.scenarios) pde::scenario_from_json(io::read_json_file(s));
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    config_error(std::string("fixture: ") + e.what());
  }
  return cfg;
}

std::vector<Record> run_campaign(const CampaignConfig& cfg) {
  std::vector<const Case*> selected;
  for (const auto& c : builtin_cases()) {
    if (cfg.suites.contains(c.info.suite)) selected.push_back(&c);
  }
  const std::vector<Case> fixtures = fixture_cases(cfg);
  for (const auto& c : fixtures) {
    if (cfg.suites.contains(c.info.suite)) selected.push_back(&c);
  }

  std::vector<Record> records;
  records.reserve(selected.size());
  for (const Case* c : selected) records.push_back(execute(*c, cfg));
  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return std::tie(a.suite, a.case_id) < std::tie(b.suite, b.case_id);
  });
  return records;
}

json report_json(const CampaignConfig& cfg, const std::vector<Record>& records) {
  json recs = json::array();
  for (const auto& r : records) {
    json residuals = json::array();
    for (const auto& res : r.residuals) residuals.push_back({{"name", res.name}, {"value", res.value}});
    recs.push_back({{"suite", r.suite},
                    {"case_id", r.case_id},
                    {"anchor", r.anchor},
                    {"inputs_digest", r.inputs_digest},
                    {"residuals", residuals},
                    {"tolerance", r.tolerance},
                    {"passed", r.passed},
                    {"note", r.note},
                    {"wall_time", "timing.json"}});
  }
  return {{"meta", {{"seed", cfg.seed}, {"version", OPCALC_VERSION}, {"config_digest", cfg.digest}, {"rng", kRngName}}},
          {"records", recs}};
}

void write_reports(const CampaignConfig& cfg, const std::vector<Record>& records) {
  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "report.json", report_json(cfg, records).dump(2) + "\n");

  std::ostringstream csv;
  csv << std::setprecision(17) << "suite,case_id,anchor,inputs_digest,residual,value,tolerance,passed\n";
  for (const auto& r : records) {
    const auto row = [&](const std::string& name, double value) {
      csv << csv_field(r.suite) << ',' << csv_field(r.case_id) << ',' << csv_field(r.anchor) << ','
          << r.inputs_digest << ',' << csv_field(name) << ',' << value << ',' << r.tolerance << ','
          << (r.passed ? "true" : "false") << '\n';
    };
    if (r.residuals.empty()) row("error", std::nan(""));
    for (const auto& res : r.residuals) row(res.name, res.value);
  }
  write_text(cfg.output_dir / "report.csv", csv.str());

  json timing = json::object();
  for (const auto& r : records) timing[r.case_id] = r.wall_seconds;
  write_text(cfg.output_dir / "timing.json", timing.dump(2) + "\n");
}

int run_suite(const CampaignConfig& cfg) {
  const std::vector<Record> records = run_campaign(cfg);
  write_reports(cfg, records);
  const bool ok = std::all_of(records.begin(), records.end(), [](const Record& r) { return r.passed; });
  return ok ? 0 : 1;
}

const std::vector<CaseInfo>& case_registry() {
  static const std::vector<CaseInfo> infos = [] {
    std::vector<CaseInfo> v;
    for (const auto& c : builtin_cases()) v.push_back(c.info);
    return v;
  }();
  return infos;
}

std::string describe_case(const std::string& id) {
  for (const auto& c : builtin_cases()) {
    if (c.info.id != id) continue;
    std::ostringstream os;
    os << c.info.id << "\n"
       << "  suite:     " << c.info.suite << "\n"
       << "  anchor:    " << c.info.anchor << "\n"
       << "  inputs:    " << c.info.inputs << "\n"
       << "  contract:  " << c.info.contract << "\n"
       << "  tolerance: " << c.tolerance << "\n";
    return os.str();
  }
  throw Error(Errc::UnknownCase, "no case '" + id + "'");
}

}  // namespace opcalc::runner
