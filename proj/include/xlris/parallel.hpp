#ifndef XLRIS_PARALLEL_HPP
#define XLRIS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xlris
{
    inline unsigned default_threads() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

    // Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are claimed dynamically,
    // so fn must write its results to a slot owned by i. The first exception is rethrown.
    template <typename Fn>
    void parallel_for(std::size_t count, unsigned threads, Fn &&fn)
    {
        threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::min<std::size_t>(count, 1u << 16))));
        if (threads <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
