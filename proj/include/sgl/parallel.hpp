#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sgl {

// Global worker-count cap for parallel_for; 0 means hardware concurrency.
// The CLI sets this from --threads / SGL_THREADS.
inline int& thread_cap() {
    static int cap = 0;
    return cap;
}

inline int effective_threads() {
    int cap = thread_cap();
    if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, cap);
}

// Runs fn(i) for i in [0, n). Each invocation must write only to its own
// output slot; results are then independent of the thread count and of
// scheduling. Work is handed out via an atomic index in blocks.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = std::min<std::size_t>(effective_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t block = std::max<std::size_t>(1, n / (8 * workers));
    std::exception_ptr err;
    std::mutex err_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(block);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + block);
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sgl
