#include "berkgreen/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace berkgreen {

namespace {

std::atomic<std::size_t> configured{0};

std::size_t default_threads() {
    if (const char* env = std::getenv("BERKGREEN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() {
    const std::size_t n = configured.load();
    return n > 0 ? n : default_threads();
}

void set_thread_count(std::size_t n) { configured.store(n); }

}  // namespace berkgreen
