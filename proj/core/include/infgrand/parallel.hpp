#pragma once

#include <cstddef>
#include <functional>

namespace infgrand {

// Worker count used by row-parallel kernels. Reads INFGRAND_THREADS when set,
// otherwise std::thread::hardware_concurrency().
std::size_t worker_count();

// Overrides the worker count for the current process (0 restores the default).
void set_worker_count(std::size_t n);

// Calls body(begin, end) over disjoint contiguous chunks of [0, n). Each index
// is handled by exactly one call, so per-index results never depend on the
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace infgrand
