#include "opcalc/fd.hpp"

#include <cmath>
#include <string>

namespace opcalc::fd {

std::vector<double> fornberg_weights(int order, std::span<const double> offsets) {
  const int n = static_cast<int>(offsets.size());
  if (order < 0 || n <= order) throw Error(Errc::InvalidArgument, "stencil too small for derivative order");
  // c[j][k]: weight of point j for the k-th derivative.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(order + 1), 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[static_cast<std::size_t>(i)] - offsets[static_cast<std::size_t>(j)];
      c2 *= c3;
      auto& ci = c[static_cast<std::size_t>(i)];
      auto& cj = c[static_cast<std::size_t>(j)];
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          ci[static_cast<std::size_t>(k)] = c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                                                   c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) / c2;
        }
        ci[0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        cj[static_cast<std::size_t>(k)] = (c4 * cj[static_cast<std::size_t>(k)] - k * cj[static_cast<std::size_t>(k - 1)]) / c3;
      }
      cj[0] = c4 * cj[0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(order)];
  return w;
}

Stencil make_stencil(int order, double t, double h, double lo, double hi) {
  if (order < 1 || order > 4) throw Error(Errc::InvalidArgument, "finite differences support orders 1..4");
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "finite-difference step must be positive");
  const int half = (order + 3) / 2;
  const double slack = 1e-12 * std::max(1.0, std::abs(t));

  Stencil st;
  st.order = order;
  st.h = h;
  st.lo = lo;
  st.hi = hi;
  if (t - half * h >= lo - slack && t + half * h <= hi + slack) {
    for (int j = -half; j <= half; ++j) st.offsets.push_back(j);
  } else {
    const int width = order + 4;
    if ((width - 1) * h > (hi - lo) + slack) {
      throw Error(Errc::StencilOutOfRange,
                  "interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "] too short for a " +
                      std::to_string(width) + "-point stencil with step " + std::to_string(h));
    }
    // Centered window shifted just far enough to fit inside [lo, hi].
    int first = -(width - 1) / 2;
    if (t + first * h < lo - slack) first = static_cast<int>(std::ceil((lo - t) / h - 1e-9));
    if (t + (first + width - 1) * h > hi + slack) first = static_cast<int>(std::floor((hi - t) / h + 1e-9)) - (width - 1);
    for (int j = 0; j < width; ++j) st.offsets.push_back(first + j);
  }
  st.weights = fornberg_weights(order, st.offsets);
  const double scale = std::pow(h, order);
  for (auto& w : st.weights) w /= scale;
  return st;
}

}  // namespace opcalc::fd
