#include "sgur/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sgur {

namespace {

std::atomic<unsigned> g_max_threads{0};

unsigned default_threads() {
    if (const char* env = std::getenv("SGUR_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    unsigned n = g_max_threads.load();
    return n >= 1 ? n : default_threads();
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (begin >= end) return;
    std::size_t n = end - begin;
    std::size_t workers = max_threads();
    if (workers > n) workers = n;
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    std::size_t base = n / workers;
    std::size_t extra = n % workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t lo = begin;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t len = base + (w < extra ? 1 : 0);
        std::size_t hi = lo + len;
        threads.emplace_back([&fn, lo, hi] { fn(lo, hi); });
        lo = hi;
    }
    for (auto& t : threads) t.join();
}

}
