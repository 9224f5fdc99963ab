#pragma once

#include <cstddef>
#include <functional>

namespace carma {

/// Number of workers used when a caller passes threads == 0.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers with static
/// contiguous chunking. body must only write to index-addressed storage, so
/// results never depend on the worker count. The first exception thrown by a
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace carma
