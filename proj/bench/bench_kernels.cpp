// Parallel kernels against their serial twins.
#include <benchmark/benchmark.h>

#include <numbers>
#include <random>
#include <vector>

#include "opcalc/kernels.hpp"

using opcalc::Complex;
using opcalc::Matrix;

namespace {

struct ContourInput {
  Matrix m;
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
};

ContourInput contour_input(int dim, int count) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ContourInput in{Matrix(dim, dim), {}, {}};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) in.m(i, j) = Complex(u(rng), u(rng));
  }
  const double radius = 2.0 * std::sqrt(static_cast<double>(dim));
  for (int j = 0; j < count; ++j) {
    const Complex z = radius * std::polar(1.0, 2.0 * std::numbers::pi * j / count);
    in.nodes.push_back(z);
    in.weights.push_back(z / static_cast<double>(count));
  }
  return in;
}

void BM_ResolventSum(benchmark::State& state) {
  const auto in = contour_input(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(opcalc::kernels::resolvent_sum(in.m, in.nodes, in.weights));
}

void BM_ResolventSumSerial(benchmark::State& state) {
  const auto in = contour_input(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(opcalc::kernels::resolvent_sum_serial(in.m, in.nodes, in.weights));
}

void BM_FourierDiff(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(opcalc::kernels::fourier_diff(static_cast<int>(state.range(0)), 6.0, 3));
}

void BM_FourierDiffSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(opcalc::kernels::fourier_diff_serial(static_cast<int>(state.range(0)), 6.0, 3));
  }
}

}  // namespace

BENCHMARK(BM_ResolventSum)->Args({8, 512})->Args({16, 1024})->Args({16, 4096})->UseRealTime();
BENCHMARK(BM_ResolventSumSerial)->Args({8, 512})->Args({16, 1024})->Args({16, 4096})->UseRealTime();
BENCHMARK(BM_FourierDiff)->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(BM_FourierDiffSerial)->Arg(64)->Arg(256)->UseRealTime();

BENCHMARK_MAIN();
