#pragma once

// ---------------------------------------------------------------------------
// Deterministic work distribution.  An index range [0, count) is cut into
// fixed-size blocks (size chosen from the problem, not from the worker
// count); workers claim block indices from an atomic counter and write each
// block's result into a preallocated slot.  The caller then combines slots
// with a pairwise tree.  Result: byte-identical output for any worker count.
// ---------------------------------------------------------------------------

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

#include "avg/summation.hpp"

namespace avg {

// Number of workers to use: explicit request, clamped to [1, hw].
inline int clamp_workers(int requested) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (requested < 1) requested = 1;
    return requested < hw ? requested : hw;
}

// Evaluate `block_fn(lo, hi)` over fixed blocks covering [0, count) and
// combine the per-block values with a pairwise tree.  block_fn must be pure.
template <typename T, typename BlockFn>
T parallel_block_sum(std::size_t count, std::size_t block_size, int workers,
                     BlockFn&& block_fn) {
    if (count == 0) return T{};
    if (block_size == 0) block_size = 1;
    std::size_t nblocks = (count + block_size - 1) / block_size;
    std::vector<T> slots(nblocks);

    workers = clamp_workers(workers);
    if (workers == 1 || nblocks == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            std::size_t lo = b * block_size;
            std::size_t hi = lo + block_size < count ? lo + block_size : count;
            slots[b] = block_fn(lo, hi);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= nblocks) break;
                std::size_t lo = b * block_size;
                std::size_t hi = lo + block_size < count ? lo + block_size : count;
                slots[b] = block_fn(lo, hi);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return pairwise_reduce(std::move(slots));
}

}  // namespace avg
