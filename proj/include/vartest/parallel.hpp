#ifndef VARTEST_PARALLEL_HPP
#define VARTEST_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace vartest {

inline int hardware_threads() {
    if (const char* env = std::getenv("VARTEST_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(i) for i in [0, count). Results must be written to
// per-index storage; the body must not depend on evaluation order, so
// the outcome is identical for any thread count.
template <typename Body>
void parallel_for(long long count, const Body& body, int threads = 0) {
    if (threads <= 0) threads = hardware_threads();
    if (count <= 0) return;
    if (threads == 1 || count == 1) {
        for (long long i = 0; i < count; ++i) body(i);
        return;
    }
    if (threads > count) threads = static_cast<int>(count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const long long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long long lo = t * chunk;
        const long long hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (long long i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace vartest

#endif
