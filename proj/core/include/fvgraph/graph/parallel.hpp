#pragma once

#include <cstddef>
#include <functional>

namespace fvg::graph {

/// Worker count for parallel_for; 1 (the default) keeps everything on the calling thread.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunks write disjoint outputs,
/// so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 16384);

}  // namespace fvg::graph
