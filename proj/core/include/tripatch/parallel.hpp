#pragma once

#include <cstddef>
#include <functional>

namespace tripatch {

/// Number of worker threads used by parallel_for. 0 = hardware concurrency.
/// Reads TRIPATCH_THREADS when the value was never set explicitly.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, n). Work items must write to disjoint state;
/// outputs are then independent of the thread count by construction.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace tripatch
