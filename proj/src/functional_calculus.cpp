#include "opcalc/functional_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "opcalc/kernels.hpp"

namespace opcalc::calc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt(Complex z) {
  return "(" + std::to_string(z.real()) + (z.imag() < 0 ? " - " : " + ") + std::to_string(std::abs(z.imag())) + "i)";
}

double spread(const std::vector<Complex>& ev, Complex c) {
  double rho = 0.0;
  for (const auto& lambda : ev) rho = std::max(rho, std::abs(lambda - c));
  return rho;
}

// Ratio spread / distance-to-cut; a circle exists around c iff this is < 1.
double enclosure_ratio(const std::vector<Complex>& ev, Complex c) {
  const double dist = distance_to_cut(c);
  if (dist <= 0.0) return std::numeric_limits<double>::infinity();
  return spread(ev, c) / dist;
}

// Compass search for the center minimizing `objective`.
template <class F>
Complex compass_search(F&& objective, Complex start) {
  Complex best = start;
  double best_val = objective(best);
  double step = 0.25 * std::max(1.0, std::abs(start));
  const double floor = 1e-9 * std::max(1.0, std::abs(start));
  for (int iter = 0; iter < 10000 && step > floor; ++iter) {
    bool improved = false;
    for (const Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
      const Complex trial = best + step * dir;
      const double val = objective(trial);
      if (val < best_val) {
        best = trial;
        best_val = val;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

Complex search_center(const std::vector<Complex>& ev, Complex start) {
  return compass_search([&](Complex c) { return enclosure_ratio(ev, c); }, start);
}

// Cluster circles use the geometric mean of the inner and outer bounds on the
// radius; the bounds must leave this much room for the trapezoid rule to converge.
constexpr double kClusterRatio = 0.8;

// Circle around ev[inside] keeping every other eigenvalue outside, or nullopt.
std::optional<Contour> cluster_circle(const std::vector<Complex>& ev, const std::vector<std::size_t>& inside,
                                      const CalcConfig& cfg) {
  std::vector<Complex> pts;
  std::vector<Complex> others;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    (std::find(inside.begin(), inside.end(), i) != inside.end() ? pts : others).push_back(ev[i]);
  }
  const auto obstacle = [&](Complex c) {
    double d = distance_to_cut(c);
    for (const auto& z : others) d = std::min(d, std::abs(z - c));
    return d;
  };
  Complex centroid = 0.0;
  for (const auto& z : pts) centroid += z;
  centroid /= static_cast<double>(pts.size());
  const Complex center = compass_search(
      [&](Complex c) {
        const double d = obstacle(c);
        return d > 0.0 ? spread(pts, c) / d : std::numeric_limits<double>::infinity();
      },
      centroid);

  double near_eig = std::numeric_limits<double>::infinity();
  for (const auto& z : others) near_eig = std::min(near_eig, std::abs(z - center));
  const double lo = spread(pts, center) / (1.0 - cfg.spectral_margin);
  const double hi = std::min(distance_to_cut(center) - cfg.branch_margin, near_eig / (1.0 + cfg.spectral_margin));
  if (!(hi > 0.0) || lo > kClusterRatio * hi) return std::nullopt;
  const double radius = std::clamp(std::sqrt(lo * hi), cfg.min_radius_fraction * hi, hi);
  return Contour{center, radius, cfg.initial_nodes};
}

double linkage(const std::vector<Complex>& ev, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  double d = std::numeric_limits<double>::infinity();
  for (auto i : a) {
    for (auto j : b) d = std::min(d, std::abs(ev[i] - ev[j]));
  }
  return d;
}


bool admissible(const std::vector<Complex>& ev, const Contour& c, const CalcConfig& cfg) {
  const double rho = spread(ev, c.center);
  return c.radius - rho >= cfg.spectral_margin * c.radius &&
         distance_to_cut(c.center) - c.radius >= cfg.branch_margin;
}

void fill_nodes(const Contour& c, HoloFunction f, int total, int first, int stride, int count,
                std::vector<Complex>& nodes, std::vector<Complex>& weights) {
  nodes.resize(static_cast<std::size_t>(count));
  weights.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double theta = 2.0 * std::numbers::pi * (first + stride * j) / total;
    const Complex unit = std::polar(1.0, theta);
    const Complex zeta = c.center + c.radius * unit;
    nodes[static_cast<std::size_t>(j)] = zeta;
    weights[static_cast<std::size_t>(j)] = f(zeta) * c.radius * unit;
  }
}

Matrix node_sum(const Matrix& m, const std::vector<Complex>& nodes, const std::vector<Complex>& weights,
                bool serial) {
  return serial ? kernels::resolvent_sum_serial(m, nodes, weights) : kernels::resolvent_sum(m, nodes, weights);
}

// Sums the doubling rule over one circle until it settles.
Matrix converge_circle(HoloFunction f, const Matrix& m, Contour& contour, const CalcConfig& cfg, double& delta) {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  int count = cfg.initial_nodes;
  fill_nodes(contour, f, count, 0, 1, count, nodes, weights);
  Matrix sum = node_sum(m, nodes, weights, cfg.serial);
  Matrix current = sum / static_cast<double>(count);
  delta = std::numeric_limits<double>::infinity();

  while (2 * count <= cfg.max_nodes) {
    // The doubled rule reuses every existing node and adds the odd ones.
    fill_nodes(contour, f, 2 * count, 1, 2, count, nodes, weights);
    sum += node_sum(m, nodes, weights, cfg.serial);
    count *= 2;
    Matrix next = sum / static_cast<double>(count);
    delta = norm2(Matrix(next - current));
    current = std::move(next);
    if (delta <= cfg.quad_tol * std::max(1.0, norm2(current))) {
      contour.nodes = count;
      return current;
    }
  }
  throw Error(Errc::QuadratureNonconvergence,
              "no convergence with " + std::to_string(count) + " nodes, last delta " + std::to_string(delta), delta);
}

}  // namespace

void validate(const CalcConfig& cfg) {
  if (!(cfg.spectral_margin > 0.0 && cfg.spectral_margin < 1.0) || !(cfg.branch_margin > 0.0) ||
      !(cfg.quad_tol > 0.0) || !(cfg.min_radius_fraction > 0.0 && cfg.min_radius_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "calculus margins and tolerances must be positive");
  }
  if (!is_power_of_two(cfg.initial_nodes) || !is_power_of_two(cfg.max_nodes) ||
      cfg.initial_nodes > cfg.max_nodes) {
    throw Error(Errc::InvalidArgument, "node counts must be powers of two with initial <= max");
  }
}

double distance_to_cut(Complex z) { return z.real() > 0.0 ? std::abs(z) : std::abs(z.imag()); }

HoloFunction HoloFunction::root(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "root order must be >= 1");
  return {Kind::PrincipalRoot, n};
}

Complex HoloFunction::operator()(Complex z) const {
  const Complex l = std::log(z);
  if (kind == Kind::PrincipalLog) return l;
  return n == 1 ? z : std::exp(l / static_cast<double>(n));
}

Contour build_contour(const Operator& m, const CalcConfig& cfg) {
  validate(cfg);
  const auto ev = eigenvalues(m.mat());

  auto nearest = std::min_element(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return distance_to_cut(a) < distance_to_cut(b);
  });
  if (distance_to_cut(*nearest) < cfg.branch_margin) {
    throw Error(Errc::BranchCutViolation,
                "eigenvalue " + fmt(*nearest) + " lies within the branch margin of (-inf, 0]; "
                "if this is U + kappa I, choose a larger kappa",
                1.0 + spread(ev, 0.0), *nearest);
  }

  Complex centroid = 0.0;
  for (const auto& lambda : ev) centroid += lambda;
  centroid /= static_cast<double>(ev.size());

  const double rho = spread(ev, centroid);
  Contour primary{centroid, std::max(1.2 * rho, cfg.min_radius_fraction * distance_to_cut(centroid)),
                  cfg.initial_nodes};
  if (admissible(ev, primary, cfg)) return primary;

  // Centroid circle crosses the cut; search the center that gives the most
  // room between spectrum and cut, then split the room geometrically.
  Complex best = search_center(ev, centroid);
  double real_max = 0.0;
  for (const auto& lambda : ev) real_max = std::max(real_max, std::abs(lambda));
  const Complex alt = search_center(ev, Complex(real_max, 0.0));
  if (enclosure_ratio(ev, alt) < enclosure_ratio(ev, best)) best = alt;

  const double best_rho = spread(ev, best);
  const double dist = distance_to_cut(best);
  const double lo = best_rho / (1.0 - cfg.spectral_margin);
  const double hi = dist - cfg.branch_margin;
  Contour fallback{best, std::clamp(std::sqrt(best_rho * dist), lo, std::max(lo, hi)), cfg.initial_nodes};
  if (lo <= hi && admissible(ev, fallback, cfg)) return fallback;

  throw Error(Errc::BranchCutViolation,
              "no circle encloses the spectrum while clearing (-inf, 0] (closest eigenvalue " + fmt(*nearest) +
                  "); if this is U + kappa I, choose a larger kappa",
              1.0 + spread(ev, 0.0), *nearest);
}

Matrix trapezoid(HoloFunction f, const Matrix& m, const Contour& contour, bool serial) {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  fill_nodes(contour, f, contour.nodes, 0, 1, contour.nodes, nodes, weights);
  return node_sum(m, nodes, weights, serial) / static_cast<double>(contour.nodes);
}

std::vector<Contour> build_contours(const Operator& m, const CalcConfig& cfg) {
  try {
    return {build_contour(m, cfg)};
  } catch (const Error& e) {
    if (e.code() != Errc::BranchCutViolation || !e.point() || distance_to_cut(*e.point()) < cfg.branch_margin) throw;
    const auto ev = eigenvalues(m.mat());
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < ev.size(); ++i) clusters.push_back({i});

    // Single-linkage merging: a pair merges when the union still has a circle,
    // or when one side has none on its own (near-coincident eigenvalues).
    for (;;) {
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t a = 0; a < clusters.size(); ++a) {
        for (std::size_t b = a + 1; b < clusters.size(); ++b) {
          pairs.emplace_back(linkage(ev, clusters[a], clusters[b]), a, b);
        }
      }
      std::sort(pairs.begin(), pairs.end());
      bool merged = false;
      for (const auto& [d, a, b] : pairs) {
        std::vector<std::size_t> joined = clusters[a];
        joined.insert(joined.end(), clusters[b].begin(), clusters[b].end());
        std::sort(joined.begin(), joined.end());
        const bool forced = !cluster_circle(ev, clusters[a], cfg) || !cluster_circle(ev, clusters[b], cfg);
        if (forced || cluster_circle(ev, joined, cfg)) {
          clusters[a] = std::move(joined);
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
          break;
        }
      }
      if (!merged) break;
    }

    std::vector<Contour> circles;
    for (const auto& c : clusters) {
      const auto circle = cluster_circle(ev, c, cfg);
      if (!circle) throw;
      circles.push_back(*circle);
    }
    return circles;
  }
}

QuadratureResult riesz_dunford_detailed(HoloFunction f, const Operator& m, const CalcConfig& cfg) {
  QuadratureResult result{Operator::zero(m.dim()), build_contours(m, cfg), 0.0};
  Matrix total = Matrix::Zero(m.dim(), m.dim());
  for (auto& contour : result.contours) {
    double delta = 0.0;
    total += converge_circle(f, m.mat(), contour, cfg, delta);
    result.last_delta = std::max(result.last_delta, delta);
  }
  result.value = Operator(std::move(total));
  return result;
}

Operator riesz_dunford(HoloFunction f, const Operator& m, const CalcConfig& cfg) {
  return riesz_dunford_detailed(f, m, cfg).value;
}

Operator principal_log(const Operator& m, const CalcConfig& cfg) {
  return riesz_dunford(HoloFunction::log(), m, cfg);
}

Operator principal_root(const Operator& m, int n, const CalcConfig& cfg) {
  return riesz_dunford(HoloFunction::root(n), m, cfg);
}

bool in_principal_sector(const Operator& a, int n) {
  const double limit = std::numbers::pi / n;
  for (const auto& lambda : eigenvalues(a.mat())) {
    if (lambda == Complex(0.0) || !(std::abs(std::arg(lambda)) < limit)) return false;
  }
  return true;
}

}  // namespace opcalc::calc
