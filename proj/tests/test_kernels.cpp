#include <numbers>

#include "doctest.h"
#include "opcalc/kernels.hpp"
#include "support.hpp"

using namespace opcalc;

TEST_CASE("resolvent sum is bitwise identical to its serial twin") {
  std::mt19937_64 rng(21);
  const Matrix m = testing_support::random_matrix(rng, 12);
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  for (int j = 0; j < 300; ++j) {
    const Complex z = 10.0 * std::polar(1.0, 2.0 * std::numbers::pi * j / 300.0);
    nodes.push_back(z);
    weights.push_back(z / 300.0);
  }
  for (int threads : {1, 2, 0}) {
    kernels::set_thread_cap(threads);
    const Matrix par = kernels::resolvent_sum(m, nodes, weights);
    const Matrix ser = kernels::resolvent_sum_serial(m, nodes, weights);
    CHECK((par - ser).cwiseAbs().maxCoeff() == 0.0);
  }
  kernels::set_thread_cap(0);
}

TEST_CASE("Fourier differentiation is bitwise identical to its serial twin") {
  for (int power : {1, 2, 3}) {
    const Matrix par = kernels::fourier_diff(64, 3.0, power);
    const Matrix ser = kernels::fourier_diff_serial(64, 3.0, power);
    CHECK((par - ser).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  std::vector<int> hit(100, 0);
  try {
    kernels::parallel_for(100, [&](std::ptrdiff_t i) {
      hit[static_cast<std::size_t>(i)] = 1;
      if (i % 30 == 17) throw Error(Errc::InvalidArgument, std::to_string(i));
    });
    FAIL("expected rethrow");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(": 17") != std::string::npos);
  }
  for (int h : hit) CHECK(h == 1);
}
