// parallel.hpp - execution policy for the data-parallel kernels
//
// Every kernel that fans out over grid points or quadrature panels takes an
// Execution argument. The serial path is the reference implementation; the
// OpenMP path writes each index into its own slot and all reductions happen
// afterwards in index order, so both paths are bitwise identical.

#pragma once

#include <cstddef>
#include <cstdint>

namespace decaykit {

enum class Execution { serial, parallel };

// Environment variable consulted by worker_count() when no explicit count was set.
inline constexpr const char* kWorkerEnvVar = "DECAYKIT_THREADS";

// n <= 0 restores the default (environment variable, then machine parallelism).
void set_worker_count(int n);
int worker_count();

template <class F>
void for_each_index(std::size_t n, Execution exec, F&& body) {
    if (exec == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

} // namespace decaykit
