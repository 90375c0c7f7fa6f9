#pragma once

#include <cstddef>
#include <span>

namespace gctl {

/// Worker count used by the parallel loops. 0 restores the runtime default.
void set_num_threads(int n);
int num_threads();

/// Runs body(i) for i in [0, n). Each index must write only its own outputs;
/// results are then independent of the worker count.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
#if defined(GCTL_HAVE_OPENMP)
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

/// Pairwise (cascade) summation with a fixed split, so the rounding pattern
/// depends only on the length of the input.
double pairwise_sum(std::span<const double> xs);

inline double pairwise_mean(std::span<const double> xs) {
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace gctl
