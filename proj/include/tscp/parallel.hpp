#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tscp {

inline int available_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs f(i) for i in [0, n) on `threads` workers (0 = runtime default).
/// Each call must write only to its own slot; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f)
{
    (void)threads;
    std::exception_ptr err;
    std::mutex mu;
    const long count = static_cast<long>(n);
#ifdef _OPENMP
    const int t = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(t)
#endif
    for (long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

/// Serial reference for parallel_for.
template <class F>
void serial_for(std::size_t n, F&& f)
{
    for (std::size_t i = 0; i < n; ++i) f(i);
}

} // namespace tscp
