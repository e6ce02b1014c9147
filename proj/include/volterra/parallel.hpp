#pragma once

#include <cstddef>
#include <functional>

namespace volterra {

/// Worker count: VOLTERRA_THREADS if set (>= 1), otherwise hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each index is
/// processed exactly once; callers write results into per-index slots so that any
/// subsequent reduction happens in a fixed order. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace volterra
