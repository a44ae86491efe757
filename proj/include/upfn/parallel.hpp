#pragma once

#include <cstddef>
#include <functional>

#ifdef UPFN_HAVE_OPENMP
#include <omp.h>
#endif

namespace upfn {

// Serial reference loop.  Kept separate so tests can compare the OpenMP path
// against it; both must produce identical results for index-wise writes.
template <class F>
void run_indexed_serial(std::size_t n, F&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Parallel loop over [0, n).  fn(i) must only write to state owned by index i.
// threads == 0 picks the runtime default, threads == 1 forces the serial path.
template <class F>
void run_indexed(std::size_t n, F&& fn, int threads = 0) {
#ifdef UPFN_HAVE_OPENMP
    if (threads != 1) {
        if (threads > 0) {
#pragma omp parallel for schedule(static) num_threads(threads)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)threads;
#endif
    run_indexed_serial(n, fn);
}

inline int hardware_threads() {
#ifdef UPFN_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace upfn
