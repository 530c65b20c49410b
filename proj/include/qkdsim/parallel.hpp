#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace qkdsim {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Splits [begin, end) into one contiguous chunk per worker. Results must
// be merged by chunk index (or be order-independent) so the worker count
// never affects the outcome.
template <class Fn>
void parallel_chunks(uint64_t begin, uint64_t end, int workers, Fn fn) {
    workers = resolve_workers(workers);
    uint64_t total = end - begin;
    if (total == 0) return;
    if (workers <= 1 || total < 2) {
        fn(begin, end, 0);
        return;
    }
    uint64_t n_chunks = std::min<uint64_t>(workers, total);
    std::vector<std::thread> threads;
    threads.reserve(n_chunks);
    uint64_t chunk = total / n_chunks, rem = total % n_chunks;
    uint64_t at = begin;
    for (uint64_t w = 0; w < n_chunks; ++w) {
        uint64_t len = chunk + (w < rem ? 1 : 0);
        threads.emplace_back(fn, at, at + len, static_cast<int>(w));
        at += len;
    }
    for (auto& t : threads) t.join();
}

}  // namespace qkdsim
