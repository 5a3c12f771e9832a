#pragma once

#include <cstddef>
#include <functional>

namespace ceik {

// Worker count: CEIK_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int thread_count();
void set_thread_count(int n);  // 0 restores the default

// Runs fn(k) for k in [0, n) over contiguous blocks. Each index is handled by
// exactly one worker, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ceik
