#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace latmom {

// Worker count: LATMOM_THREADS env var, else hardware concurrency.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("LATMOM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(begin,end) over a partition of [0,n) with `threads` workers.
// Chunk boundaries depend only on n and threads; callers that write to
// disjoint per-index slots get results independent of scheduling.
inline void parallel_for(uint64_t n, unsigned threads,
                         const std::function<void(uint64_t, uint64_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    if (threads > n) threads = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    uint64_t chunk = n / threads, rem = n % threads, begin = 0;
    for (unsigned t = 0; t < threads; ++t) {
        uint64_t len = chunk + (t < rem ? 1 : 0);
        pool.emplace_back(fn, begin, begin + len);
        begin += len;
    }
    for (auto& th : pool) th.join();
}

}  // namespace latmom
