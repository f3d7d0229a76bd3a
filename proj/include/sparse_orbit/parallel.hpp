#pragma once

// Deterministic helpers: a counter-based generator and an index-ordered
// parallel loop. Results never depend on the number of worker threads.

#include "sparse_orbit/numeric.hpp"

#include <cstdlib>
#include <exception>
#include <algorithm>
#include <thread>
#include <vector>

namespace sparse_orbit {

/// splitmix64 finalizer.
inline u64 mix64(u64 z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw(i) depends only on (seed, stream, i), so any
/// subset of draws can be reproduced independently of evaluation order.
class CounterRng {
public:
    CounterRng(u64 seed, u64 stream) : key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

    u64 draw(u64 counter) const { return mix64(key_ ^ mix64(counter)); }
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(u64 counter) const { return static_cast<double>(draw(counter) >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, bound), bound >= 1 (multiply-shift, negligible bias).
    u64 below(u64 counter, u64 bound) const {
        return static_cast<u64>((static_cast<u128>(draw(counter)) * bound) >> 64);
    }

private:
    u64 key_;
};

/// Worker count: SPARSE_ORBIT_THREADS if set to a positive integer, else the
/// hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SPARSE_ORBIT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for i in [0, n), distributing indices over worker threads in
/// contiguous blocks. fn must only write to per-index state. The first
/// exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (unsigned w = 0; w < workers; ++w) {
        if (errors[w]) std::rethrow_exception(errors[w]);
    }
}

/// Index-ordered map: out[i] = fn(i).
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace sparse_orbit
