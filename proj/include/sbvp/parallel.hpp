#pragma once

#include <cstddef>
#include <functional>

namespace sbvp {

/// Process-wide worker count. Defaults to $STOCH_BVP_THREADS, else the
/// hardware concurrency. Results never depend on it: every parallel loop
/// writes to index-addressed slots and reductions happen afterwards in index
/// order.
std::size_t thread_count();
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count) on up to thread_count() workers with
/// contiguous static chunks. The first exception (lowest chunk) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sbvp
