#pragma once

#include <cstddef>

#ifdef GEOLAB_OPENMP
#include <omp.h>
#endif

namespace geolab {

// Runtime switch between the OpenMP kernels and the serial reference path.
// Each parallel_for body writes a disjoint output slot, so results are
// bitwise identical regardless of thread count.
inline bool& parallel_enabled() {
  static bool on = true;
  return on;
}

inline int hardware_threads() {
#ifdef GEOLAB_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
#ifdef GEOLAB_OPENMP
  if (parallel_enabled() && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

// Serial reference, kept callable so tests and the benchmark can compare
// against the parallel path explicitly.
template <class F>
void serial_for(std::ptrdiff_t n, F&& body) {
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace geolab
