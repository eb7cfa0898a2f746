// SPDX-License-Identifier: Apache-2.0
// Timing harness for the parallel kernels against their serial reference
// twins. Prints one line per kernel with both timings and the parity check;
// on single-core hosts the speedup hovers around 1, which is expected.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specstab/rng.hpp"
#include "specstab/stability.hpp"

using namespace specstab;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ComplexMatrix shifted_test_matrix(Rng& rng, Index n) {
  ComplexMatrix a = rng.matrix(n, n);
  a -= (a.norm() / std::sqrt(static_cast<double>(n))) *
       ComplexMatrix::Identity(n, n);
  return a;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  Rng rng(7);
  const Index n = 160;
  const ComplexMatrix a = shifted_test_matrix(rng, n);
  const WeightedSpace space = WeightedSpace::identity(n);

  std::vector<double> omegas;
  for (int k = 0; k < 400; ++k) omegas.push_back(-20.0 + 0.1 * k);

  auto t0 = std::chrono::steady_clock::now();
  const auto scan_par = resolvent_norm_scan(a, space, omegas);
  const double scan_par_s = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto scan_ser = resolvent_norm_scan_serial(a, space, omegas);
  const double scan_ser_s = seconds_since(t0);
  double scan_dev = 0.0;
  for (std::size_t k = 0; k < scan_par.size(); ++k) {
    scan_dev = std::max(scan_dev, std::abs(scan_par[k].norm - scan_ser[k].norm));
  }
  std::printf("resolvent_norm_scan      parallel %.3fs  serial %.3fs  max dev %.1e\n",
              scan_par_s, scan_ser_s, scan_dev);

  t0 = std::chrono::steady_clock::now();
  const auto range_par = numerical_range_boundary(a, space, 512);
  const double range_par_s = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto range_ser = numerical_range_boundary_serial(a, space, 512);
  const double range_ser_s = seconds_since(t0);
  double range_dev = 0.0;
  for (std::size_t k = 0; k < range_par.size(); ++k) {
    range_dev = std::max(range_dev, std::abs(range_par[k] - range_ser[k]));
  }
  std::printf("numerical_range_boundary parallel %.3fs  serial %.3fs  max dev %.1e\n",
              range_par_s, range_ser_s, range_dev);

  const bool match = scan_dev == 0.0 && range_dev == 0.0;
  std::printf("parity: %s\n", match ? "identical" : "MISMATCH");
  return match ? 0 : 1;
}
