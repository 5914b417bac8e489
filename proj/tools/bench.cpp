#include "oimac/capacity.hpp"
#include "oimac/cli.hpp"
#include "oimac/decomp.hpp"

#include <chrono>
#include <cstdio>

// Compares the serial reference kernels against the OpenMP path on the two
// grid-parallel workloads: CF-factorization verification and bound sweeps.

namespace {

template <class F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    using namespace oimac;
#ifdef OIMAC_HAVE_OPENMP
    std::printf("OpenMP enabled\n");
#else
    std::printf("OpenMP not available; parallel path falls back to serial\n");
#endif

    {
        const auto d = decompose_truncexp_contracted(8, 1.5);
        double r_serial = 0.0, r_parallel = 0.0;
        const double ms_s =
            time_ms([&] { r_serial = cf_max_residual(d.target, d.u1, d.u2, Exec::serial); }, 20);
        const double ms_p =
            time_ms([&] { r_parallel = cf_max_residual(d.target, d.u1, d.u2, Exec::parallel); }, 20);
        std::printf("cf grid residual   serial %8.3f ms   parallel %8.3f ms   speedup %.2fx   "
                    "identical %s\n",
                    ms_s, ms_p, ms_s / ms_p, r_serial == r_parallel ? "yes" : "NO");
    }

    {
        const ChannelConfig cfg = ChannelConfig::peak_average(0.3, 0.4, 0.4, 1.0);
        std::vector<double> snr(41);
        for (int i = 0; i < 41; ++i) snr[static_cast<std::size_t>(i)] = i;
        std::vector<BoundCurve> serial_curves, parallel_curves;
        const double ms_s = time_ms(
            [&] { serial_curves = compute_curves(cfg, {"lower_thm3", "lower_discrete"}, snr,
                                                 Exec::serial); },
            3);
        const double ms_p = time_ms(
            [&] { parallel_curves = compute_curves(cfg, {"lower_thm3", "lower_discrete"}, snr,
                                                   Exec::parallel); },
            3);
        bool same = true;
        for (std::size_t c = 0; c < serial_curves.size(); ++c)
            for (std::size_t i = 0; i < snr.size(); ++i)
                same = same &&
                       serial_curves[c].points[i].value == parallel_curves[c].points[i].value;
        std::printf("bound sweep        serial %8.3f ms   parallel %8.3f ms   speedup %.2fx   "
                    "identical %s\n",
                    ms_s, ms_p, ms_s / ms_p, same ? "yes" : "NO");
    }
    return 0;
}
