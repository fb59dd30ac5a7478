#include "sacsp/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sacsp::parallel {

int worker_count() {
#ifdef _OPENMP
    int n = 1;
#pragma omp parallel
    {
#pragma omp single
        n = omp_get_num_threads();
    }
    return n > 1 ? n : 1;
#else
    return 1;
#endif
}

void set_worker_count(int n) {
#ifdef _OPENMP
    if (n >= 1) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

void configure_from_env() {
    const char* v = std::getenv("SACSP_THREADS");
    if (!v) return;
    try {
        int n = std::stoi(v);
        if (n >= 1) set_worker_count(n);
    } catch (...) {
        // ignore malformed values, keep the runtime default
    }
}

}  // namespace sacsp::parallel
