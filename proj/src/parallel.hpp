#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace worldlet::detail {

inline unsigned effective_threads(unsigned requested, std::size_t work_items) {
    unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work_items, 1)));
}

// Calls fn(item, worker) for item in [0, count), items handed out dynamically.
// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = effective_threads(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](unsigned worker) {
        try {
            for (std::size_t i = next++; i < count; i = next++) fn(i, worker);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body, w);
    body(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace worldlet::detail
