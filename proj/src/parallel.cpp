#include "hacover/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hacover {

std::size_t worker_count(std::size_t jobs) {
    if (jobs < 2) return 1;
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("HACOVER_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) hw = std::min<std::size_t>(hw, static_cast<std::size_t>(parsed));
    }
    return std::min(hw, jobs);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = worker_count(n);
    if (workers == 1) {
        body(0, n);
        return;
    }
    // Contiguous chunks; the body only writes slots within its own [begin, end)
    // so the result is independent of scheduling.
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace hacover
