#pragma once
// Minimal data-parallel loop. Work items write to their own slots, callers
// reduce in index order, so results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sqlab {

inline int default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : (int)h;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (n == 0) return;
    std::size_t nt = (std::size_t)std::max(1, threads);
    nt = std::min(nt, n);
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    const std::size_t chunk = std::max<std::size_t>(1, n / (nt * 16));
    auto worker = [&] {
        try {
            for (;;) {
                std::size_t lo = next.fetch_add(chunk);
                if (lo >= n) break;
                std::size_t hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sqlab
