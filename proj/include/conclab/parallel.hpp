#pragma once

#include <cstddef>

namespace conclab {

// Serial reference for the OpenMP kernel below. Kept as its own entry point
// so tests can compare outputs and the benchmark can time both.
template <typename Body>
void for_each_index_serial(std::size_t count, Body&& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

template <typename Body>
void for_each_index_parallel(std::size_t count, int threads, Body&& body) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    body(static_cast<std::size_t>(i));
}

// Fan a data-parallel kernel over [0, count). Bodies must write results into
// per-index slots; aggregation stays outside, ordered by index, so the output
// is identical for every thread count.
template <typename Body>
void for_each_index(std::size_t count, int threads, Body&& body) {
  if (threads <= 1)
    for_each_index_serial(count, body);
  else
    for_each_index_parallel(count, threads, body);
}

}  // namespace conclab
