// parallel.hpp: static-partition parallel loop and worker-count resolution

#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace qgs {

inline constexpr const char* kWorkersEnv = "QGS_SIM_WORKERS";

// requested > 0 wins, then QGS_SIM_WORKERS, then 1.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

// Calls fn(i) for i in [0, n). Worker w owns the contiguous block
// [w n / W, (w+1) n / W), so every index is handled by a fixed worker and
// per-index results do not depend on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const std::size_t w_count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
    if (w_count <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w_count);
    std::vector<std::thread> threads;
    threads.reserve(w_count);
    for (std::size_t w = 0; w < w_count; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w * n / w_count; i < (w + 1) * n / w_count; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace qgs
