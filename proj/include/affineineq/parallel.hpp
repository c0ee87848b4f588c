#pragma once

#include <cstddef>
#include <functional>

namespace affineineq {

/// Worker count: AFFINEINEQ_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(begin, end) over fixed-size chunks of [0, count).
///
/// Chunk boundaries depend only on count and chunk, never on the worker
/// count, so callers that write per-chunk partials and reduce them in chunk
/// order get bit-identical results for any AFFINEINEQ_THREADS setting.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Per-index variant; body must only write to slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace affineineq
