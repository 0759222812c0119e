#include "tripatch/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tripatch {

namespace {
int g_threads = -1; // -1 = unset

int resolve_threads() {
    if (g_threads > 0) return g_threads;
    if (const char* env = std::getenv("TRIPATCH_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}
} // namespace

void set_thread_count(int n) { g_threads = n; }

int thread_count() { return resolve_threads(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = resolve_threads();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(count - 1);
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

} // namespace tripatch
