#pragma once

#include <cstddef>

// Data-parallel kernel over grid indices. The parallel path uses OpenMP when
// available; the serial path is the reference implementation and must produce
// bit-identical results (each index is computed independently, so the only
// difference is scheduling).

namespace oimac {

enum class Exec { serial, parallel };

template <class F>
void grid_apply(std::size_t n, Exec mode, F&& f) {
#ifdef OIMAC_HAVE_OPENMP
    if (mode == Exec::parallel) {
        const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < nn; ++i) f(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace oimac
