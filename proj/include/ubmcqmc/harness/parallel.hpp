#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ubmcqmc {

inline std::size_t max_jobs() { return std::max<std::size_t>(1, std::thread::hardware_concurrency()); }

/// Calls f(i) for i in [0, n) on up to `jobs` threads. Task i always runs on
/// thread i % jobs; results must be written to per-index slots.
template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += jobs) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ubmcqmc
