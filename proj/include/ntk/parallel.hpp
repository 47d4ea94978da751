#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace ntk {

/// Worker count: NTK_THREADS if set to a positive integer, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n) on contiguous static chunks. Each index is visited exactly
/// once, so writes to per-index slots are deterministic regardless of scheduling. The
/// exception from the lowest failing chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ntk
