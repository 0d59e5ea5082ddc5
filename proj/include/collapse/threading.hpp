#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace collapse {

// Runs fn(block_index) for block_index in [0, n_blocks) on up to n_threads
// workers. Each block is processed by exactly one worker; callers that need
// reproducible reductions store per-block partials and combine them in block
// order afterwards, which makes results independent of the worker count.
inline void parallel_blocks(std::size_t n_blocks, unsigned n_threads,
                            const std::function<void(std::size_t)>& fn) {
    if (n_blocks == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned workers = n_threads == 0 ? hw : n_threads;
    if (workers > n_blocks) workers = static_cast<unsigned>(n_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) break;
                fn(b);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace collapse
