#pragma once

// Strided worker split shared by the quadrature loops. Each index is handled
// by exactly one worker and results are combined by the caller in index
// order, so totals do not depend on the thread count.

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace defectgeo::detail {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(int n, unsigned threads, Body body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1))));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([=, &body, &failure, &guard] {
            try {
                for (int i = static_cast<int>(t); i < n; i += static_cast<int>(threads)) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline double ordered_sum(const std::vector<double>& parts)
{
    double s = 0.0;
    for (double v : parts) s += v;
    return s;
}

}  // namespace defectgeo::detail
