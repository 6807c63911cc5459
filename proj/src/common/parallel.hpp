#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cddp {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must be
// independent; callers aggregate results afterwards in index order, so the
// outcome does not depend on the worker count.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cddp
