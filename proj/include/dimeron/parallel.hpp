#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace dimeron {

/// Worker count: DIMERON_LAB_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Evaluates f(0..n-1) on up to `threads` workers. Results are stored by
/// index, so the output never depends on scheduling. If any call throws, the
/// exception from the lowest failing index is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f, std::size_t threads)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

}  // namespace dimeron
