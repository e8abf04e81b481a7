#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lclt {

// Deterministic chunked parallel-for: the chunk grid is fixed by (total,
// chunk_size) alone, workers pull chunk indices from a shared counter, and
// callers combine per-chunk results in index order.  Output is therefore
// independent of the thread count.
inline void parallel_chunks(size_t total, size_t chunk_size, int threads,
                            const std::function<void(size_t begin, size_t end, size_t chunk_index)>& fn) {
    if (total == 0) return;
    size_t n_chunks = (total + chunk_size - 1) / chunk_size;
    if (threads <= 1 || n_chunks == 1) {
        for (size_t c = 0; c < n_chunks; ++c)
            fn(c * chunk_size, std::min(total, (c + 1) * chunk_size), c);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c * chunk_size, std::min(total, (c + 1) * chunk_size), c);
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<int>(threads, static_cast<int>(n_chunks));
    pool.reserve(static_cast<size_t>(nt));
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

}  // namespace lclt
