#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace gauge {

/// Worker count: a ScopedThreadCount override, else GAUGECALC_THREADS, else
/// the hardware concurrency. Always >= 1.
std::size_t thread_count();

/// Overrides thread_count() for its lifetime.
class ScopedThreadCount {
public:
    explicit ScopedThreadCount(std::size_t threads);
    ~ScopedThreadCount();
    ScopedThreadCount(const ScopedThreadCount&) = delete;
    ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

private:
    std::size_t previous_;
};

/// results[i] = fn(i) for i < count. Results are independent of the thread
/// count; if any call throws, the exception of the smallest index is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F&& fn) {
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(thread_count(), count);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace gauge
