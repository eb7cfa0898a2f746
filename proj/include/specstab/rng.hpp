// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "specstab/types.hpp"

namespace specstab {

/// Deterministic random source. The mt19937_64 engine is fully specified by
/// the C++ standard, and all value mappings below are implemented here rather
/// than taken from <random> distributions (whose streams are
/// implementation-defined), so a seed pins the exact sample sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
  }

  /// iid complex standard normal entries, filled column-major.
  ComplexMatrix matrix(Index rows, Index cols) {
    ComplexMatrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) a(i, j) = complex_normal();
    return a;
  }

  ComplexMatrix hermitian(Index n) {
    const ComplexMatrix a = matrix(n, n);
    return 0.5 * (a + a.adjoint());
  }

  ComplexMatrix skew_hermitian(Index n) {
    const ComplexMatrix a = matrix(n, n);
    return 0.5 * (a - a.adjoint());
  }

  /// Hermitian positive definite with smallest eigenvalue >= floor.
  ComplexMatrix hermitian_pd(Index n, double floor = 0.5) {
    const ComplexMatrix a = matrix(n, n);
    ComplexMatrix g = a * a.adjoint();
    g /= g.norm();
    g += floor * ComplexMatrix::Identity(n, n);
    return 0.5 * (g + g.adjoint());
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace specstab
