#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nlvis {

// Number of worker threads; NLVIS_WORKERS overrides the hardware count.
unsigned worker_count();

// Runs fn(block, begin, end) over fixed blocks of [0, n). Block boundaries
// depend only on n and block_size, never on the worker count.
void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Sum of fn(begin, end) over fixed blocks, combined in block order so the
// result is bit-identical for any worker count.
double blocked_sum(std::size_t n, std::size_t block_size,
                   const std::function<double(std::size_t, std::size_t)>& fn);

}  // namespace nlvis
