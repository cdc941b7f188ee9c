#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace folab {

// Hardware concurrency, capped by FOLIATION_LAB_THREADS when set to a positive integer.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FOLIATION_LAB_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return n;
}

// Calls body(i) for i in [0, n) over contiguous chunks; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace folab
