#pragma once

#include <cstddef>
#include <functional>

namespace scatterbound {

/// Thread count: explicit request if > 0, else SCATTERBOUND_THREADS, else the
/// number of logical cores.
int resolve_thread_count(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index runs
/// exactly once; the first exception thrown (lowest index) is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace scatterbound
