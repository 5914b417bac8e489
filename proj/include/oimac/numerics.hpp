#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

// Deterministic scalar numerics: bracketed bisection, 1-D maximization
// (coarse grid + golden-section refinement), the Gaussian Q-function, and
// series summation with certified remainders.

namespace oimac {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSignChange : NumericsError {
    using NumericsError::NumericsError;
};
struct MaxIterExceeded : NumericsError {
    using NumericsError::NumericsError;
};
struct EmptyDomain : NumericsError {
    using NumericsError::NumericsError;
};
struct TailBoundUnavailable : NumericsError {
    using NumericsError::NumericsError;
};

struct RootSpec {
    std::function<double(double)> fn;
    double lo = 0.0;
    double hi = 0.0;
    double tol = 1e-12;   // on bracket width
    int max_iter = 200;
};

// Bisection on a sign-changing bracket. The caller asserts monotonicity;
// the result is the midpoint of the final bracket.
double bisect(const RootSpec& spec);

struct MaximizeSpec {
    std::function<double(double)> fn;
    double lo = 0.0;
    double hi = 0.0;
    bool log_grid = false;  // log-spaced scan, requires lo > 0
    int grid = 512;         // >= 3
    double tol = 1e-10;     // golden-section bracket width
};

struct MaxResult {
    double arg = 0.0;
    double value = 0.0;
};

// Coarse scan followed by golden-section refinement around the best grid
// point. Heuristic-global, exact-local; the returned value is never below
// any evaluated grid point.
MaxResult maximize_1d(const MaximizeSpec& spec);

// Scan domain for unbounded suprema, documented knob: all objectives used
// here decay at the extremes of (0, inf).
inline constexpr double kUnboundedScanLo = 1e-6;
inline constexpr double kUnboundedScanHi = 1e6;

// Inset applied to half-open interval endpoints before scanning.
inline constexpr double kOpenEndpointEps = 1e-9;

// Upper tail of the standard normal, relative error <= 1e-12.
double q_func(double x);

// Sums term(0), term(1), ... until tail_bound(n) (a certified bound on the
// omitted remainder after the first n terms) drops to tail_target.
// tail_bound(0) == 0 means the empty series. Throws TailBoundUnavailable if
// the bound never certifies within max_terms or is not finite.
double series_sum(const std::function<double(std::size_t)>& term,
                  const std::function<double(std::size_t)>& tail_bound,
                  double tail_target = 1e-14,
                  std::size_t max_terms = 1u << 22);

// Expands hi upward (geometrically) until fn(hi) <= target, then bisects
// fn(x) = target for a strictly decreasing fn on (lo0, inf). Returns lo0
// when even fn(lo0) <= target (the constraint is slack at the left edge).
double solve_decreasing(const std::function<double(double)>& fn, double target,
                        double lo0, double hi0, double tol = 1e-12);

}  // namespace oimac
