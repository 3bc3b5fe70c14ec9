// OpenMP-backed index-parallel loop with a serial reference path.
//
// Every batch evaluation in this library writes results into preallocated
// slots indexed by the loop variable, so the serial path (jobs <= 1) and the
// parallel path produce bit-identical outputs; tests and the benchmark tool
// compare the two directly.

#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sasp {

inline int hardware_jobs() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <typename Fn>
void parallel_for_index(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            {
                if (!error) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace sasp
