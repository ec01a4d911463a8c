#pragma once

#include <cstddef>

namespace emml {

// Global worker cap shared by every parallel kernel. 0 means "hardware
// default". Changing the cap never changes results, only wall-clock: every
// kernel keeps a fixed reduction order.
void set_max_threads(int n);
int max_threads();
bool openmp_enabled();

namespace detail {
void parallel_for_impl(std::size_t n, void (*fn)(std::size_t, void*), void* ctx);
}

// Runs body(i) for i in [0, n). Iterations must be independent.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    auto trampoline = [](std::size_t i, void* ctx) { (*static_cast<F*>(ctx))(i); };
    detail::parallel_for_impl(n, trampoline, &body);
}

} // namespace emml
