#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace vgr {

// Runs f(i) for i in [begin, end) on a fixed deterministic chunking.
// Chunks write disjoint data, so results do not depend on scheduling.
template <class F>
void parallel_for(int begin, int end, F&& f) {
    int n = end - begin;
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    int workers = static_cast<int>(std::max(1u, hw));
    if (n < 256 || workers == 1) {
        for (int i = begin; i < end; ++i) f(i);
        return;
    }
    workers = std::min(workers, n);
    int chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        int lo = begin + w * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &f] {
            for (int i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace vgr
