#pragma once
// Bounded worker pool for chunked data parallelism. Worker count comes from
// BSDLAB_THREADS (default: hardware concurrency). Chunk results must be
// merged deterministically by the caller.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bsdlab {

inline unsigned worker_count() {
    if (const char* env = std::getenv("BSDLAB_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Splits [0, n) into contiguous chunks, runs body(chunk_index, begin, end) on
// each; chunk order and boundaries are independent of the worker count used
// for scheduling, so per-chunk results merge deterministically.
inline void parallel_chunks(std::size_t n, std::size_t n_chunks,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    n_chunks = std::clamp<std::size_t>(n_chunks, 1, n);
    unsigned workers = std::min<std::size_t>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t b = c * n / n_chunks, e = (c + 1) * n / n_chunks;
            body(c, b, e);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < n_chunks; c += workers) {
                std::size_t b = c * n / n_chunks, e = (c + 1) * n / n_chunks;
                body(c, b, e);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace bsdlab
