#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qckit {

/// Worker count for data-parallel loops.  Honours the QCKIT_THREADS
/// environment variable (values < 1 are clamped to 1); falls back to the
/// hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("QCKIT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Static-chunked parallel loop over [0, n).  Each index is processed
/// exactly once and results must be written to per-index slots by the
/// caller, so output is deterministic regardless of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = thread_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = std::size_t(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace qckit
