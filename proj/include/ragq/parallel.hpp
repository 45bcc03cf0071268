#pragma once

#include <cstddef>

#include <omp.h>

namespace ragq {

// Execution policy for the data-parallel kernels. `serial` runs the same
// arithmetic on one thread and is the reference the parallel path is tested
// against; both produce bit-identical results.
enum class Exec { serial, parallel };

inline Exec default_exec() { return Exec::parallel; }

// Calls fn(i) for i in [0, n). Iterations must be independent; any reduction
// over their results has to happen afterwards in index order.
template <typename Fn>
void parallel_for(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::serial || n < 2 || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

inline int max_threads() { return omp_get_max_threads(); }

}  // namespace ragq
