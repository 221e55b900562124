#include "decaykit/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace decaykit {

namespace {
std::atomic<int> g_workers{0};

int default_workers() {
    if (const char* env = std::getenv(kWorkerEnvVar)) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_num_procs();
}
} // namespace

void set_worker_count(int n) { g_workers.store(n > 0 ? n : 0); }

int worker_count() {
    const int n = g_workers.load();
    return n > 0 ? n : default_workers();
}

} // namespace decaykit
