#ifndef OUTWAVE_PARALLEL_HPP
#define OUTWAVE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace outwave
{
    /// Worker count: OUTWAVE_THREADS when set to a positive integer, else hardware concurrency.
    inline std::size_t worker_count()
    {
        std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("OUTWAVE_THREADS"))
        {
            try
            {
                const long v = std::stol(env);
                if (v > 0)
                    return static_cast<std::size_t>(v);
            }
            catch (const std::exception&)
            {
            }
        }
        return hw;
    }

    /// Runs fn(i) for i in [0, n) on up to worker_count() threads.
    /// Each index is handled exactly once; the first exception is rethrown after all workers join.
    template <class F>
    void parallel_for(std::size_t n, F&& fn, std::size_t max_workers = 0)
    {
        const std::size_t workers = std::min(n, max_workers ? max_workers : worker_count());
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
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
                    }
                }
            });
        }
        for (auto& t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
} // namespace outwave

#endif
