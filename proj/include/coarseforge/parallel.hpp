#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace coarseforge {

/// Worker count: hardware concurrency capped by COARSE_FORGE_THREADS.
inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("COARSE_FORGE_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

/// Run body(i) for i in [0, n). Iterations must be independent; results are
/// deterministic because each index owns its own output slot.
inline void parallel_for(long n, const std::function<void(long)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (long i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace coarseforge
