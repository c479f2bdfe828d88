#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "brw/errors.hpp"

namespace brw {

// Runs fn(i) for i in [0, count) on the requested number of threads and
// returns the results in index order. Work is claimed through a shared
// counter, results land in their own slots, so the output is identical
// for any thread count.
template <typename T>
std::vector<T> parallel_map(std::size_t count,
                            const std::function<T(std::size_t)>& fn,
                            unsigned threads = 1) {
    if (threads == 0) throw DomainError("parallel_map needs threads >= 1");
    std::vector<T> out(count);
    if (count == 0) return out;
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            out[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(
        std::min<std::size_t>(threads, count));
    pool.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

} // namespace brw
