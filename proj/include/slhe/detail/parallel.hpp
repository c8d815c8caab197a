#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace slhe::detail {

// Splits [0, count) into contiguous chunks, one worker thread per chunk.
// Deterministic by construction: every index is processed exactly once and
// workers never share output rows.
inline void parallel_for(int count, const std::function<void(int, int)>& body) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    int workers = std::clamp(count, 1, hw > 0 ? hw : 1);
    if (workers <= 1 || count <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int lo = w * chunk;
        int hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace slhe::detail
