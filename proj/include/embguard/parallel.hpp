#pragma once

#include <cstddef>
#include <functional>

namespace embguard {

// Worker count: EMBGUARD_THREADS if set and > 0, otherwise hardware
// concurrency. Cached after the first call.
unsigned thread_count();

// Runs fn(i) for i in [0, n) across workers in contiguous chunks. Each
// iteration must only write state indexed by i; under that contract results
// are identical for any worker count. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace embguard
