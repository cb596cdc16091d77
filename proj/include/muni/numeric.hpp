#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace muni {

/// Pairwise (cascade) summation. The summation tree depends only on the
/// length of the input, so results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

/// Worker cap from MUNI_ECON_THREADS (default: hardware concurrency, min 1).
unsigned thread_cap();

/// Runs body(i) for i in [0, n). Each index must write only its own outputs;
/// under that contract the results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned max_threads = 0);

}  // namespace muni
