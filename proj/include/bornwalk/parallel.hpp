#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace bornwalk {

// Deterministic chunked parallel-for: the index range is cut into fixed-size
// chunks; workers claim chunks atomically; per-chunk results land in a slot
// vector merged sequentially in chunk order afterwards, so the outcome is
// identical for any thread count.
inline constexpr std::int64_t kChunkSize = 8192;

template <typename Slot, typename ChunkFn>
std::vector<Slot> chunked_parallel(std::int64_t total, int threads, ChunkFn&& fn) {
    const std::int64_t nchunks = total > 0 ? (total + kChunkSize - 1) / kChunkSize : 0;
    std::vector<Slot> slots(static_cast<std::size_t>(nchunks));
    if (nchunks == 0) return slots;
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            const std::int64_t lo = c * kChunkSize;
            const std::int64_t hi = std::min(total, lo + kChunkSize);
            fn(c, lo, hi, slots[static_cast<std::size_t>(c)]);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return slots;
}

} // namespace bornwalk
