#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace gkpsim {

inline int thread_count() {
    if (const char* env = std::getenv("GKPSIM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Chunked index-range parallelism. fn(begin, end) must be thread-safe across
// disjoint ranges. Runs inline when a single worker suffices.
inline void parallel_for(long n, const std::function<void(long, long)>& fn) {
    int workers = thread_count();
    if (workers <= 1 || n < 2) {
        if (n > 0) fn(0, n);
        return;
    }
    if (workers > n) workers = static_cast<int>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        long b = w * chunk;
        long e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace gkpsim
