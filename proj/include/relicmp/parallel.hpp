#pragma once

#include <cstddef>
#include <functional>

namespace relicmp {

/// Resolves a worker count: a positive request wins, otherwise the
/// RELICMP_WORKERS environment variable, otherwise hardware concurrency.
int resolve_workers(int requested);

/// Runs body(i) for i in [0, n) on `workers` threads. Work items must write
/// only to their own output slot; the schedule is dynamic but results end up
/// identical to a serial run because item i never depends on the executing
/// thread. Exceptions propagate (first one wins).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace relicmp
