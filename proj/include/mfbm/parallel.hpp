#pragma once
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#if defined(MFBM_HAVE_OPENMP)
#include <omp.h>
#endif

namespace mfbm {

// Runs fn(replica) for replica = 0..n-1 and collects the results in replica
// order. The parallel route distributes replicas over OpenMP threads; the
// serial route is the reference implementation kept for testing. Replica
// outcomes never depend on scheduling because every replica derives its own
// RNG streams from (seed, replica), so both routes produce bit-identical
// results; the benchmark target and the determinism tests compare them.
//
// A replica that throws poisons the whole run: the first error (by replica
// index) is rethrown after the loop completes, so parallel and serial runs
// fail identically.
template <typename T>
std::vector<T> run_replicas(int n, bool parallel, const std::function<T(int)>& fn) {
    if (n < 0) throw std::invalid_argument("run_replicas: negative replica count");
    std::vector<T> out(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));
    bool failed = false;

#if defined(MFBM_HAVE_OPENMP)
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
#pragma omp atomic write
                failed = true;
            }
        }
    } else
#else
    (void)parallel;
#endif
    {
        for (int i = 0; i < n; ++i) {
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
                failed = true;
            }
        }
    }

    if (failed) {
        for (int i = 0; i < n; ++i)
            if (!errors[static_cast<std::size_t>(i)].empty())
                throw std::runtime_error("replica " + std::to_string(i) + ": " +
                                         errors[static_cast<std::size_t>(i)]);
    }
    return out;
}

inline int replica_thread_count() {
#if defined(MFBM_HAVE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace mfbm
