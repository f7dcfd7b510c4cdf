#include "gauge/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gauge {

namespace {

std::atomic<std::size_t> g_override{0};

}  // namespace

std::size_t thread_count() {
    if (const std::size_t o = g_override.load()) return o;
    if (const char* env = std::getenv("GAUGECALC_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

ScopedThreadCount::ScopedThreadCount(std::size_t threads) : previous_(g_override.exchange(threads)) {}

ScopedThreadCount::~ScopedThreadCount() { g_override.store(previous_); }

}  // namespace gauge
