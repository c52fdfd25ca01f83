#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace sigmafilt::detail {

// Splits [0, n) into contiguous chunks, one per worker. Each index is
// processed by exactly one thread and every output element is written by
// the thread that owns it, so results are bit-identical to a serial run.
template <typename Fn>
void parallel_for(int n, std::size_t work_per_item, Fn&& fn) {
    constexpr std::size_t kSerialWorkLimit = 1u << 16;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw < 2 || static_cast<std::size_t>(n) * work_per_item <= kSerialWorkLimit) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([begin, end, &fn] {
            for (int i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace sigmafilt::detail
