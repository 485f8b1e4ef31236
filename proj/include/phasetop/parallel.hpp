#pragma once

#include <cstddef>
#include <functional>

namespace phasetop {

/// Worker count: PHASETOP_THREADS when set to a positive integer, capped by
/// the hardware concurrency; at least 1.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to
/// slot i of its output; the exception from the
/// lowest failing index is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace phasetop
