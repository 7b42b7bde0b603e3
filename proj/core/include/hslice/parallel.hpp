#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace hslice {

int resolve_workers(int requested);

// Splits [0, total) into fixed-size blocks, runs fn(lo, hi, block_index) on a
// worker pool, and returns the per-block results ordered by block index. Block
// boundaries depend only on (total, block_size), so reducing the returned
// vector front-to-back yields results that are independent of the worker
// count — including bit-for-bit identical floating-point sums.
template <typename R, typename Fn>
std::vector<R> map_blocks(uint64_t total, uint64_t block_size, int workers, Fn&& fn) {
    if (block_size == 0) block_size = 1;
    uint64_t blocks = (total + block_size - 1) / block_size;
    std::vector<R> results(blocks);
    if (blocks == 0) return results;

    int pool = resolve_workers(workers);
    if (pool <= 1 || blocks == 1) {
        for (uint64_t b = 0; b < blocks; ++b) {
            uint64_t lo = b * block_size;
            results[b] = fn(lo, std::min(total, lo + block_size), b);
        }
        return results;
    }

    std::atomic<uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            uint64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            uint64_t lo = b * block_size;
            results[b] = fn(lo, std::min(total, lo + block_size), b);
        }
    };
    std::vector<std::thread> threads;
    size_t nthreads = std::min<uint64_t>(pool, blocks);
    threads.reserve(nthreads);
    for (size_t i = 0; i < nthreads; ++i) threads.emplace_back(work);
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace hslice
