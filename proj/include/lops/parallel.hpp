#pragma once

#include <cstddef>
#include <functional>

namespace lops {

/// Worker count: LO_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Work is
/// handed out by index, so any per-index output is deterministic. The first
/// exception thrown by a worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lops
