#pragma once

#include <cstddef>
#include <functional>

namespace mm {

// Worker count: MULTIMAPPER_THREADS if set and > 0, otherwise the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs fn(i) for i in [0, n) across worker_count() threads. Each index runs
// exactly once; calls made from inside a worker run serially; callers write results into per-index slots so output order
// never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mm
