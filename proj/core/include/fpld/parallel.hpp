#pragma once

#include <cstddef>
#include <functional>

namespace fpld {

/// Caps worker threads used by parallel loops (0 = hardware concurrency).
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn(chunk) for chunk in [0, chunks). Chunks must write disjoint
/// outputs; merge order is the caller's responsibility, so results never
/// depend on the number of threads.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn);

/// Default chunk count for Monte-Carlo loops; fixed so results are
/// independent of the thread cap.
inline constexpr std::size_t kMcChunks = 64;

}  // namespace fpld
