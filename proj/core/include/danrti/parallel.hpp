#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace danrti {

/// Runs fn(0..n-1) on a small worker pool with a static block partition.
/// Results must be written to index-addressed slots so aggregation order is
/// independent of scheduling. threads == 0 uses the hardware count.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
    if (n <= 0) return;
    unsigned int workers = threads > 0 ? static_cast<unsigned int>(threads)
                                       : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > static_cast<unsigned int>(n)) workers = static_cast<unsigned int>(n);

    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    for (unsigned int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace danrti
