#pragma once

#include <cstddef>
#include <functional>

namespace scalelab::threads {

// Worker count: SCALELAB_THREADS when set (clamped to [1, 256]),
// otherwise the hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [0, n) over contiguous index blocks. Results must
// be written to per-index slots so the outcome is independent of the
// worker count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace scalelab::threads
