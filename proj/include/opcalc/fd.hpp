#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "opcalc/linalg.hpp"

namespace opcalc::fd {

/// Fornberg weights for the `order`-th derivative at 0 from samples at `offsets`.
std::vector<double> fornberg_weights(int order, std::span<const double> offsets);

/// Fourth-order accurate stencil for d^order/dt^order at t, step h, with all
/// sample points inside [lo, hi]. Central when it fits, otherwise a one-sided
/// window of order + 4 points pushed against the violated end.
struct Stencil {
  int order = 1;
  double h = 0.0;
  std::vector<double> offsets;  ///< in units of h
  std::vector<double> weights;  ///< already divided by h^order
  double lo = 0.0;
  double hi = 0.0;

  /// Sample point j, clamped into [lo, hi] against roundoff.
  double point(double t, std::size_t j) const { return std::clamp(t + offsets[j] * h, lo, hi); }
};

Stencil make_stencil(int order, double t, double h, double lo, double hi);

template <class F>
Matrix apply(const Stencil& st, double t, F&& sample) {
  Matrix acc;
  for (std::size_t j = 0; j < st.offsets.size(); ++j) {
    if (st.weights[j] == 0.0) continue;
    Matrix term = st.weights[j] * sample(st.point(t, j));
    if (acc.size() == 0) {
      acc = std::move(term);
    } else {
      acc += term;
    }
  }
  return acc;
}

}  // namespace opcalc::fd
