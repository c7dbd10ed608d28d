#include "biwave/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace biwave {

int worker_cap() {
    static const int cap = [] {
        const char* env = std::getenv("BIWAVE_THREADS");
        if (!env) return 1;
        int n = 0;
        try {
            n = std::stoi(env);
        } catch (...) {
            return 1;
        }
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        return std::clamp(n, 1, hw);
    }();
    return cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int workers = worker_cap();
    if (workers <= 1 || n < 1024) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace biwave
