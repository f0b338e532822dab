#pragma once

#include <cstddef>
#include <functional>

namespace polarfft {

/// Number of worker threads used by parallel_for. Defaults to 1.
int thread_count();
/// Values below 1 are clamped to 1.
void set_thread_count(int n);

/// Calls body(begin, end) on contiguous chunks of [0, n). Chunks are
/// disjoint; with one thread the body runs once on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace polarfft
