#include "gad/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gad {

namespace {

std::atomic<int> g_workers{0};
thread_local bool t_inside_worker = false;

int default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

int worker_count() {
    int w = g_workers.load(std::memory_order_relaxed);
    return w > 0 ? w : default_workers();
}

void set_worker_count(int workers) {
    g_workers.store(workers > 0 ? workers : 0, std::memory_order_relaxed);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = worker_count();
    if (workers <= 1 || t_inside_worker || n == 1) {
        fn(0, n);
        return;
    }
    const int chunks = static_cast<int>(std::min<std::int64_t>(workers, n));
    const std::int64_t chunk = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const std::int64_t begin = c * chunk;
        const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            t_inside_worker = true;
            fn(begin, end);
            t_inside_worker = false;
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace gad
