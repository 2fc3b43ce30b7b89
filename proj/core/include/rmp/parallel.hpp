#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rmp {

// Worker cap for Monte Carlo loops. 0 means hardware concurrency.
struct Parallelism {
    unsigned threads = 0;

    unsigned resolve(std::size_t work_items) const {
        unsigned t = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
        return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work_items, 1)));
    }
};

// Calls fn(i) for every i in [0, count). Work items must write only to their
// own output slot; results are then combined by the caller in index order,
// which is what makes every estimator independent of the worker count.
template <class Fn>
void parallel_for(std::size_t count, Parallelism par, Fn&& fn) {
    const unsigned workers = par.resolve(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace rmp
