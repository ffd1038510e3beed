#pragma once

#include <cstddef>
#include <functional>

namespace palmgrid {

/// Process-wide cap on worker threads (the CLI's --threads). 0 means
/// hardware concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(begin, end) over a static partition of [0, count). Callers must
/// only write to disjoint outputs per index so the result is independent of
/// the partition.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace palmgrid
