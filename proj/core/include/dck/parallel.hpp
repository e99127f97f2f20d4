#pragma once

#include <cstddef>
#include <functional>

namespace dck {

/// Number of worker threads: DCK_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
[[nodiscard]] std::size_t worker_count();

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// one chunk per worker. The first exception thrown by any chunk is
/// rethrown after all workers have joined. Results must not depend on the
/// chunking.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dck
