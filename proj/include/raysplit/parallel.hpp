#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace raysplit {

/// Run f(i) for i in [0, n). When `serial` is true the loop body runs on the
/// calling thread in index order; otherwise it is distributed over OpenMP
/// threads (when built with OpenMP). Kernels in this library are written so
/// both modes produce bitwise-identical results, which the test suite and the
/// bench target rely on.
template <class F>
void parallel_for(std::size_t n, bool serial, F&& f) {
  if (serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    f(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace raysplit
