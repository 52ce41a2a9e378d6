#pragma once

#include <cstddef>
#include <functional>

namespace curvehedge {

/// Work is cut into fixed blocks of this many indices regardless of the thread
/// count, so per-block partial results merge in the same order every run.
inline constexpr std::size_t kParallelBlock = 256;

/// 0 means "use all hardware threads".
std::size_t resolve_threads(std::size_t requested);

/// Calls body(block_index, begin, end) for every block of [0, n). Blocks are
/// handed to at most `threads` workers; the first exception is rethrown.
void parallel_blocks(std::size_t n, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t block = kParallelBlock);

inline std::size_t block_count(std::size_t n, std::size_t block = kParallelBlock) {
    return (n + block - 1) / block;
}

}  // namespace curvehedge
