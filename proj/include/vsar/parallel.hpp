#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vsar {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}
// set inside workers so nested loops run serially
inline bool& in_worker() {
    thread_local bool w = false;
    return w;
}
}  // namespace detail

// Worker cap; 0 means "VSAR_THREADS or hardware concurrency".
inline void set_max_threads(unsigned n) { detail::thread_cap() = n; }

inline unsigned max_threads() {
    unsigned n = detail::thread_cap();
    if (n == 0) {
        if (const char* e = std::getenv("VSAR_THREADS")) n = static_cast<unsigned>(std::atoi(e));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// Runs f(i) for i in [0, n) over a static block partition. Exceptions are rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned nt =
        detail::in_worker() ? 1u : static_cast<unsigned>(std::min<std::size_t>(max_threads(), n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) {
        pool.emplace_back([&] {
            detail::in_worker() = true;
            try {
                for (std::size_t i = next++; i < n; i = next++) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace vsar
