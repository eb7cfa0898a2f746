// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdlib>
#include <utility>

#if defined(SPECSTAB_HAVE_OPENMP)
#include <omp.h>
#endif

namespace specstab {

/// Worker count for parallel scan kernels. The THREADS environment variable
/// overrides the OpenMP default; without OpenMP this is always 1.
inline int max_threads() {
  static const int cached = [] {
    int n = 1;
#if defined(SPECSTAB_HAVE_OPENMP)
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("THREADS")) {
      const int req = std::atoi(env);
      if (req >= 1) n = req;
    }
    return n;
  }();
  return cached;
}

/// Runs body(i) for i in [0, n). Iterations must be independent, must write
/// only to their own output slot, and must not throw. Results are identical
/// to serial_for for such bodies, whatever the thread count.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
#if defined(SPECSTAB_HAVE_OPENMP)
#pragma omp parallel for schedule(static) num_threads(specstab::max_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

/// Serial reference loop; kept so tests and benchmarks can compare the
/// parallel path against a plain implementation.
template <class F>
void serial_for(std::ptrdiff_t n, F&& body) {
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace specstab
