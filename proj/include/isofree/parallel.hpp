#pragma once

#include <cstddef>
#include <functional>

namespace isofree {

// Worker count: ISOFREE_THREADS if set and positive, else logical cores.
std::size_t worker_count();

// Runs body(i) for i in [0, count) across worker_count() threads. Each index
// is visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace isofree
