#pragma once

#include <cstddef>
#include <functional>

namespace perhf {

/// Number of worker threads used for per-fiber work (default 1).
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written to slot i are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace perhf
