#pragma once

#include <cstddef>
#include <functional>

namespace permix {

/// Worker count used by parallel loops. Defaults to PERMIX_THREADS when set,
/// otherwise the hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned threads);

/// Runs body(begin, end) over contiguous blocks covering [0, count).
/// Callers must make each block's effect independent of the blocking, so the
/// result does not depend on the thread count.
void parallel_blocks(std::size_t count,
                     const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace permix
