#include "opcalc/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opcalc::kernels {

namespace {

constexpr std::ptrdiff_t kBlock = 64;

void check_spans(std::span<const Complex> nodes, std::span<const Complex> weights) {
  if (nodes.size() != weights.size()) throw Error(Errc::DimensionMismatch, "nodes and weights differ in length");
}

Matrix node_term(const Matrix& m, Complex zeta, Complex weight) {
  Matrix shifted = -m;
  shifted.diagonal().array() += zeta;
  Matrix r = shifted.partialPivLu().inverse();
  r *= weight;
  return r;
}

// Symbol (i k)^p of mode index `mode` on a period-`length` domain.
Complex mode_symbol(int mode, double length, int power) {
  const Complex ik(0.0, 2.0 * std::numbers::pi * mode / length);
  Complex symbol = 1.0;
  for (int i = 0; i < power; ++i) symbol *= ik;
  return symbol;
}

// Entry for row - col = offset (mod n); the matrix is circulant.
Complex fourier_entry(int n, double length, int power, int offset) {
  Complex acc = 0.0;
  for (int mode = -n / 2 + 1; mode < n / 2; ++mode) {
    const double phase = 2.0 * std::numbers::pi * mode * offset / n;
    acc += mode_symbol(mode, length, power) * Complex(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(n);
}

void check_grid(int n, double length, int power) {
  if (n < 2 || n % 2 != 0) throw Error(Errc::InvalidArgument, "grid size must be even and >= 2");
  if (!(length > 0.0)) throw Error(Errc::InvalidArgument, "domain length must be positive");
  if (power < 1) throw Error(Errc::InvalidArgument, "derivative power must be >= 1");
}

}  // namespace

void set_thread_cap(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads >= 1 ? threads : omp_get_num_procs());
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix resolvent_sum(const Matrix& m, std::span<const Complex> nodes, std::span<const Complex> weights) {
  check_spans(nodes, weights);
  const auto count = static_cast<std::ptrdiff_t>(nodes.size());
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  std::vector<Matrix> block(static_cast<std::size_t>(std::min(count, kBlock)));
  for (std::ptrdiff_t first = 0; first < count; first += kBlock) {
    const std::ptrdiff_t len = std::min(kBlock, count - first);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < len; ++j) {
      block[static_cast<std::size_t>(j)] = node_term(m, nodes[first + j], weights[first + j]);
    }
    for (std::ptrdiff_t j = 0; j < len; ++j) acc += block[static_cast<std::size_t>(j)];
  }
  return acc;
}

Matrix resolvent_sum_serial(const Matrix& m, std::span<const Complex> nodes, std::span<const Complex> weights) {
  check_spans(nodes, weights);
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t j = 0; j < nodes.size(); ++j) acc += node_term(m, nodes[j], weights[j]);
  return acc;
}

Matrix fourier_diff(int n, double length, int power) {
  check_grid(n, length, power);
  std::vector<Complex> entries(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int offset = 0; offset < n; ++offset) entries[static_cast<std::size_t>(offset)] = fourier_entry(n, length, power, offset);
  Matrix d(n, n);
#pragma omp parallel for schedule(static)
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) d(row, col) = entries[static_cast<std::size_t>((row - col + n) % n)];
  }
  return d;
}

Matrix fourier_diff_serial(int n, double length, int power) {
  check_grid(n, length, power);
  std::vector<Complex> entries(static_cast<std::size_t>(n));
  for (int offset = 0; offset < n; ++offset) entries[static_cast<std::size_t>(offset)] = fourier_entry(n, length, power, offset);
  Matrix d(n, n);
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) d(row, col) = entries[static_cast<std::size_t>((row - col + n) % n)];
  }
  return d;
}

}  // namespace opcalc::kernels
