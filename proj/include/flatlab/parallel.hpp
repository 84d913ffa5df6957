#pragma once

#include <cstddef>
#include <functional>

namespace flatlab {

/// Worker threads used by Monte Carlo loops and direction scans. Default 1.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Each index must write only its own
/// output slot so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace flatlab
