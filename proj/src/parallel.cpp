#include "emml/parallel.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace emml {

namespace {
std::atomic<int> g_thread_cap{0};
}

void set_max_threads(int n) { g_thread_cap.store(n < 0 ? 0 : n); }

int max_threads() {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    int cap = g_thread_cap.load();
    if (cap > 0) return std::min(cap, hw) > 0 ? std::min(cap, hw) : 1;
    return hw;
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

namespace detail {

void parallel_for_impl(std::size_t n, void (*fn)(std::size_t, void*), void* ctx) {
#ifdef _OPENMP
    int threads = max_threads();
    if (threads > 1 && n > 1) {
#pragma omp parallel for num_threads(threads) schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i), ctx);
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i, ctx);
}

} // namespace detail

} // namespace emml
