#pragma once

#include <cstdint>
#include <functional>

namespace ooc {

/// Number of workers actually used for a request: 0 picks the hardware
/// concurrency, anything else is taken as-is (minimum 1).
int resolve_threads(int requested);

/// Runs fn(i) for every i in [0, count) on `threads` workers.
///
/// Work is dealt in round-robin stripes, and fn must confine its writes to
/// slot i of any shared output.  Results are then independent of the worker
/// count, which is what makes --threads invariance possible downstream.
/// The first exception thrown by any fn is rethrown after all workers join.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace ooc
