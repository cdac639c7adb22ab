#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace condens {

/// Process-wide worker count used by grid evaluation and Monte Carlo loops.
/// 0 restores the default (hardware concurrency).
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls body(begin, end) on contiguous, disjoint chunks of [0, n).
/// The chunking depends only on n and `chunk`, never on the worker count, so
/// any per-chunk reduction merged in chunk order is reproducible.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk, Body&& body)
{
    if (n == 0)
        return;
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t chunks = (n + chunk - 1) / chunk;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), chunks));
    auto run = [&](std::size_t c) { body(c * chunk, std::min(n, (c + 1) * chunk)); };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            run(c);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t c = w; c < chunks; c += workers)
                    run(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace condens
