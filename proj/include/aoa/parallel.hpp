#pragma once

#include <cstddef>
#include <functional>

namespace aoa {

/// Worker count from AOA_THREADS, else the hardware concurrency (min 1).
int default_thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Callers write
/// results into per-index slots, so output does not depend on scheduling.
/// The first exception thrown by fn is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace aoa
