#pragma once

#include <chrono>
#include <cstddef>
#include <functional>

namespace gpe {

/// Wall-clock stopwatch on the monotonic clock.
class Stopwatch {
public:
    Stopwatch() : start_(clock::now()) {}
    void reset() { start_ = clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

/// Worker cap for parallel loops: hardware concurrency clamped by the
/// NUM_THREADS environment variable. Always >= 1.
int max_threads();

/// Runs fn(chunk_begin, chunk_end) over [0, n) split into fixed-size chunks.
/// Chunking depends only on n, never on the worker count, so callers that
/// merge per-chunk buffers in chunk order get bit-identical results for any
/// thread count. fn must only touch its own chunk's state.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

} // namespace gpe
