#include "oimac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oimac {

double bisect(const RootSpec& spec) {
    double lo = spec.lo, hi = spec.hi;
    if (!(lo < hi)) throw NoSignChange("bisect: empty bracket");
    double flo = spec.fn(lo);
    double fhi = spec.fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NoSignChange("bisect: no sign change across bracket");
    for (int i = 0; i < spec.max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= spec.tol || mid == lo || mid == hi)
            return mid;
        const double fmid = spec.fn(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    throw MaxIterExceeded("bisect: bracket did not shrink to tolerance");
}

MaxResult maximize_1d(const MaximizeSpec& spec) {
    if (!(spec.lo <= spec.hi)) throw EmptyDomain("maximize_1d: empty domain");
    if (spec.lo == spec.hi) return {spec.lo, spec.fn(spec.lo)};
    const int n = std::max(spec.grid, 3);
    std::vector<double> xs(static_cast<std::size_t>(n));
    if (spec.log_grid) {
        if (!(spec.lo > 0.0)) throw EmptyDomain("maximize_1d: log grid needs lo > 0");
        const double llo = std::log(spec.lo), lhi = std::log(spec.hi);
        for (int i = 0; i < n; ++i)
            xs[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    } else {
        for (int i = 0; i < n; ++i)
            xs[static_cast<std::size_t>(i)] = spec.lo + (spec.hi - spec.lo) * i / (n - 1);
    }
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double v = spec.fn(xs[static_cast<std::size_t>(i)]);
        if (std::isfinite(v) && v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!std::isfinite(best_val))
        throw EmptyDomain("maximize_1d: objective not finite anywhere on grid");

    // Golden-section refinement inside the bracket around the best grid point.
    double a = xs[static_cast<std::size_t>(std::max(best - 1, 0))];
    double b = xs[static_cast<std::size_t>(std::min(best + 1, n - 1))];
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = spec.fn(x1), f2 = spec.fn(x2);
    while (b - a > spec.tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = spec.fn(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = spec.fn(x1);
        }
    }
    MaxResult res{xs[static_cast<std::size_t>(best)], best_val};
    const double xm = 0.5 * (a + b);
    const double fm = spec.fn(xm);
    if (std::isfinite(fm) && fm > res.value) res = {xm, fm};
    if (std::isfinite(f1) && f1 > res.value) res = {x1, f1};
    if (std::isfinite(f2) && f2 > res.value) res = {x2, f2};
    return res;
}

double q_func(double x) { return 0.5 * std::erfc(x * 0.7071067811865476); }

double series_sum(const std::function<double(std::size_t)>& term,
                  const std::function<double(std::size_t)>& tail_bound,
                  double tail_target, std::size_t max_terms) {
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (std::size_t n = 0; n <= max_terms; ++n) {
        const double tb = tail_bound(n);
        if (!std::isfinite(tb) || tb < 0.0)
            throw TailBoundUnavailable("series_sum: tail bound not finite");
        if (tb <= tail_target) return sum;
        const double y = term(n) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    throw TailBoundUnavailable("series_sum: tail bound did not certify within max_terms");
}

double solve_decreasing(const std::function<double(double)>& fn, double target,
                        double lo0, double hi0, double tol) {
    if (fn(lo0) <= target) return lo0;
    double hi = hi0;
    int guard = 0;
    while (fn(hi) > target) {
        hi *= 2.0;
        if (++guard > 80)
            throw NoSignChange("solve_decreasing: could not bracket the root");
    }
    RootSpec spec;
    spec.fn = [&](double x) { return fn(x) - target; };
    spec.lo = lo0;
    spec.hi = hi;
    spec.tol = tol;
    return bisect(spec);
}

}  // namespace oimac
