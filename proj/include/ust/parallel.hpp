#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ust {

inline constexpr const char* kWorkersEnv = "UST_WORKERS";

/// Worker count from UST_WORKERS, else the hardware concurrency; never below 1.
inline std::size_t worker_count() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(state, i) for i in [0, count) and returns the results indexed by i. Worker k
/// owns its own state (from make_state) and handles i = k, k + W, k + 2W, ... Results
/// depend only on i, so the output is the same for any worker count. If bodies throw, the
/// exception of the lowest failing index is rethrown after all workers stop.
template <class R, class MakeState, class Body>
std::vector<R> parallel_replicas(std::size_t count, std::size_t workers, MakeState&& make_state, Body&& body) {
    std::vector<R> results(count);
    if (workers == 0) workers = 1;
    if (workers > count) workers = count == 0 ? 1 : count;
    std::vector<std::pair<std::size_t, std::exception_ptr>> failures(workers, {count, nullptr});
    auto run = [&](std::size_t k) {
        try {
            auto state = make_state();
            for (std::size_t i = k; i < count; i += workers) {
                try {
                    results[i] = body(state, i);
                } catch (...) {
                    failures[k] = {i, std::current_exception()};
                    return;
                }
            }
        } catch (...) {
            failures[k] = {k, std::current_exception()};
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(run, k);
        for (auto& t : pool) t.join();
    }
    std::pair<std::size_t, std::exception_ptr> first{count, nullptr};
    for (const auto& f : failures)
        if (f.second && f.first < first.first) first = f;
    if (first.second) std::rethrow_exception(first.second);
    return results;
}

}  // namespace ust
