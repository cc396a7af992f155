#ifndef RELWALK_PARALLEL_HPP
#define RELWALK_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace relwalk {

/// Worker count used when a caller passes 0: $RELWALK_THREADS, else 1.
inline unsigned default_thread_count()
{
    if (const char* env = std::getenv("RELWALK_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return 1;
}

/**
 * Runs body(i) for i in [0, n) on up to `threads` workers. Indices are
 * handed out in contiguous blocks; callers write results into slot i, so the
 * outcome never depends on scheduling. The first exception thrown (lowest
 * index wins) is rethrown on the calling thread.
 */
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body)
{
    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace relwalk

#endif
