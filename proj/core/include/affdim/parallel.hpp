#pragma once

#include <cstddef>
#include <functional>

namespace affdim {

/// Worker count: hardware concurrency, capped by AFFINE_DIM_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.  Bodies
/// must write only to slot i of caller-owned storage; callers reduce in index
/// order afterwards, so results never depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace affdim
