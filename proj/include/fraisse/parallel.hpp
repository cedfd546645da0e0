#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fraisse {

// Evaluates fn(i) for i in [0, n) across `jobs` threads into a result slot
// per index. Workers pull indices from an atomic counter; results are
// positional, so any later reduction in index order is independent of the
// worker count and of scheduling.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, int jobs, Fn&& fn) {
    std::vector<Result> results(n);
    if (n == 0) return results;
    if (jobs < 1) jobs = 1;
    jobs = static_cast<int>(std::min<std::size_t>(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

} // namespace fraisse
