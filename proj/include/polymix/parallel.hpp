#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace polymix {

// Worker count: POLYMIX_WORKERS wins, then the explicit request, then the
// hardware. Results never depend on the outcome; only wall time does.
inline unsigned resolve_workers(unsigned requested = 0) {
    if (const char* env = std::getenv("POLYMIX_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Partition [0, trials) into contiguous ranges, one per worker. The body is
// body(worker_index, begin, end); each trial derives its own RNG stream from
// the trial index, so any partition yields identical results.
template <class Body>
inline void run_trial_ranges(std::uint64_t trials, unsigned workers, Body&& body) {
    workers = std::max(1u, workers);
    if (trials > 0 && static_cast<std::uint64_t>(workers) > trials)
        workers = static_cast<unsigned>(trials);
    if (workers == 1) {
        body(0u, std::uint64_t{0}, trials);
        return;
    }
    const std::uint64_t chunk = trials / workers;
    const std::uint64_t rem = trials % workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::uint64_t lo = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t hi = lo + chunk + (w < rem ? 1 : 0);
        pool.emplace_back([&, w, lo, hi] {
            try {
                body(w, lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        lo = hi;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace polymix
