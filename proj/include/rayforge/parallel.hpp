#pragma once
#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rayforge {

// process-wide default used when callers pass threads <= 0
int default_threads();
void set_default_threads(int n);

// Runs fn(i) for i in [0, n). Work is handed out by index, so as long as fn only
// writes slot i the result does not depend on the thread count. The first
// exception (lowest index) is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
    if (threads <= 0) threads = default_threads();
    std::size_t nt = std::min<std::size_t>(std::max(threads, 1), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t err_idx = n;
    std::exception_ptr err;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (i < err_idx) {
                    err_idx = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace rayforge
