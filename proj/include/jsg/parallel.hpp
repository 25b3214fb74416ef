#pragma once

#include <cstddef>
#include <functional>

namespace jsg {

/// Worker count: JSG_THREADS when set to a positive integer, else the hardware concurrency.
int thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the thread count, and results must be written to
/// disjoint slots, so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace jsg
