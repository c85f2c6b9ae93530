#pragma once

#include <cstddef>
#include <functional>

namespace fracheat {

// Number of worker threads: min(hardware, FRACHEAT_THREADS if set).
int thread_count();

// Static-partition parallel loop over [0, n).  Each index is visited exactly
// once by exactly one thread; callers must only write disjoint locations, so
// results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace fracheat
