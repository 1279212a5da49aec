#pragma once

#include <cstddef>
#include <functional>

namespace ballgap {

// Global worker budget. Affects speed only: all parallel loops below hand out
// fixed-size blocks whose results are combined in block order, so the output
// is identical for any thread count.
void set_max_threads(int n);
int max_threads();

// Calls fn(block_index, begin, end) for consecutive blocks covering
// [0, total). Blocks may run on any thread; fn must only write state owned by
// its block index.
void parallel_blocks(size_t total, size_t block_size,
                     const std::function<void(size_t, size_t, size_t)>& fn);

}  // namespace ballgap
