#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "opcalc/linalg.hpp"

// Data-parallel inner loops. Every parallel kernel has a *_serial twin that
// performs the identical floating-point operations in the identical order;
// the tests hold the pair to bitwise equality and bench/ times them.
namespace opcalc::kernels {

/// Caps the OpenMP worker count; values < 1 restore the runtime default.
void set_thread_cap(int threads);
int thread_count();

/// sum_j weights[j] * (nodes[j] I - m)^{-1}, accumulated in index order.
/// Resolvents are evaluated concurrently in fixed-size blocks, so the result
/// is bit-identical for any thread count.
Matrix resolvent_sum(const Matrix& m, std::span<const Complex> nodes, std::span<const Complex> weights);
Matrix resolvent_sum_serial(const Matrix& m, std::span<const Complex> nodes, std::span<const Complex> weights);

/// Dense periodic spectral differentiation matrix of order `power` on n
/// equispaced points of a period-`length` domain (Nyquist mode dropped).
Matrix fourier_diff(int n, double length, int power);
Matrix fourier_diff_serial(int n, double length, int power);

/// Runs body(i) for i in [0, n) across the worker pool. Each index writes
/// only its own output slot, so results do not depend on scheduling. The
/// exception from the lowest failing index is rethrown after the loop.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n > 0 ? n : 0));
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace opcalc::kernels
