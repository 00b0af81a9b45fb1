#pragma once

// Index-partitioned parallel loops. Every task writes only its own slot,
// so results are identical for any worker count.

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimcav::parallel {

/// 0 means "use the OpenMP default".
inline int resolve_workers(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

inline bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

/// Runs fn(i) for i in [0, n). The first exception thrown by any task is
/// rethrown on the calling thread after the loop.
template <class Fn>
void for_each_index(std::size_t n, int workers, Fn&& fn) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const long long count = static_cast<long long>(n);
  const int threads = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  (void)threads;
  if (error) std::rethrow_exception(error);
}

}  // namespace mimcav::parallel
