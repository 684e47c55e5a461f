#pragma once
//============================================================================
// parallel.hpp
//
// Thin shared-memory parallelism layer.  All hot loops in the library walk
// independent output elements (modes, harmonics, grid points, matrix rows),
// so a static-schedule parallel-for is the only primitive needed.  Results
// are bit-identical to the serial reference because each element is computed
// by the same scalar code regardless of the thread count.
//
// FSM_THREADS caps the number of threads (FSM_THREADS=1 forces serial).
//============================================================================

#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fsm::par {

// Resolved once per call; cheap enough that caching is not worth the
// global state.
inline int thread_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("FSM_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
#else
    return 1;
#endif
}

// Serial reference loop.  Kept as a named entry point so tests and the
// benchmark can compare it against the OpenMP path explicitly.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

// OpenMP loop over [0, n).  Independent writes only; no reductions.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
    const int nt = thread_count();
    if (nt > 1 && n > 1) {
        const long long ln = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long long i = 0; i < ln; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    serial_for(n, body);
}

} // namespace fsm::par
