#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace georing::detail {

/// Evaluates fn(i) for i in [0, count) on a small thread pool; results land at
/// their own index, so the output never depends on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn)
{
    std::vector<T> out(count);
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t workers = std::min<std::size_t>(hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
    return out;
}

}  // namespace georing::detail
