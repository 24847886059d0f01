#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace noiselab {

// Every parallel kernel in this library also has a serial path; the two must
// produce bit-identical results (each work item owns its inputs and outputs).
enum class ExecPolicy { serial, openmp };

template <typename Fn>
void parallel_for(std::size_t n, ExecPolicy policy, Fn&& fn) {
#ifdef _OPENMP
  if (policy == ExecPolicy::openmp) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)policy;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace noiselab
