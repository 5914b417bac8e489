#pragma once

#include "oimac/dist.hpp"
#include "oimac/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Constructive decompositions of uniform / exponential / geometric-type
// distributions into sums of two independent factors, the greedy subsum
// selector behind the mean-targeted exponential split, and machine-checkable
// certificates (characteristic-function factorization on a fixed grid, mean
// additivity, exact discrete convolution, optional Monte-Carlo check).

namespace oimac {

struct DecompError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConditionViolated : DecompError {
    using DecompError::DecompError;
};
struct TargetOutOfRange : DecompError {
    using DecompError::DecompError;
};
struct DivisibilityViolated : DecompError {
    using DecompError::DecompError;
};
struct ParameterOrderViolated : DecompError {
    using DecompError::DecompError;
};

// CF verification grid; resolves every atom spacing >= 1/64 used in tests.
inline constexpr double kCfGridLo = -50.0;
inline constexpr double kCfGridHi = 50.0;
inline constexpr int kCfGridPoints = 2001;

struct IndexSet {
    std::vector<long> indices;  // sorted, may be negative
    double achieved_sum = 0.0;
    double target = 0.0;
    double residual = 0.0;  // |achieved_sum - target|
};

struct CheckItem {
    std::string name;
    bool satisfied = false;
    double margin = 0.0;
};

struct DecompositionReport {
    double cf_max_residual = 0.0;
    double mean_sum_residual = 0.0;
    std::vector<CheckItem> checks;
    std::optional<double> mc_ks;
    double tolerance = 0.0;
    bool pass = false;
};

// Greedy subsum selection on a strictly decreasing positive sequence whose
// every term is dominated by its remainder (checked up to the stored depth,
// with tail_sum certifying the remainder beyond it). Picks the smallest
// admissible index each step; capped at 10^4 selections.
IndexSet subsum_greedy(const std::vector<double>& terms, double tail_sum, double target);

// One term of the two-sided dyadic exponential series: value 2^j carried
// with probability 1/(1+e^{lambda 2^j}); term_value = 2^j * prob.
double exp_series_term(long j, double lambda = 1.0);

// The two-sided series rearranged into a strictly decreasing sequence that
// satisfies the subsum-domination condition (each merged entry combines the
// geometric-side and the doubly-exponential-side term of matching depth; the
// first few entries are kept single and sorted).
struct RearrangedSeries {
    std::vector<double> terms;                   // strictly decreasing
    std::vector<std::vector<long>> z_indices;    // source indices per entry
    double tail_sum = 0.0;                       // certified sum beyond depth
};
RearrangedSeries exp_rearranged_series(std::size_t depth = 200);

// Indices of the 1-digits in the terminating binary expansion of a in (0,1).
std::vector<long> binary_digit_indices(double a);

struct Decomposition {
    ScalarDist target;
    ScalarDist u1;
    ScalarDist u2;
    std::optional<IndexSet> index_set;
};

// Uniform[0,1] split along the binary digits of a: factor supports inside
// [0,a] and [0,1-a], digits carried by fair Bernoulli variables.
Decomposition decompose_uniform_binary(double a);

// Uniform[0,1] = Uniform[0,1/k] + k-point discrete uniform.
Decomposition decompose_uniform_contracted(long k);

// Exp(1) = Exp(1/a) + (a delta_0 + (1-a) Exp(1)).
Decomposition decompose_exp_verdu(double a);

// Exp(1) split with E[U1] = a via greedy subsum selection over the
// two-sided dyadic series; returns the selected index set.
Decomposition decompose_exp_binary(double a);

// TruncExp[0,1] split along the binary digits of a; certified mean bounds
// E[U1] <= a/2 and E[U2] <= (1-a)/2.
Decomposition decompose_truncexp_binary(double a, double lambda);

// TruncExp([0,1], lambda) = TruncExp([0,1/k], lambda) + k-point truncated
// geometric with parameter 1-e^{-lambda/k}.
Decomposition decompose_truncexp_contracted(long k, double lambda);

// Uniform on {0..k} with k+1 = n(k1+1): factors uniform on {0..k1} and on
// {j(k1+1), j in [n-1]}.
Decomposition decompose_discrete_uniform(long k1, long n);

// Geometric(lambda) = Geometric(lambda1) + atom/geometric mixture.
Decomposition decompose_geometric(double lambda, double lambda1);

// Truncated geometric on {0..k}, k+1 = n(k1+1): truncated geometric factors
// with parameters lambda and 1-(1-lambda)^{k1+1}.
Decomposition decompose_truncgeom(long k1, long n, double lambda);

struct VerifyOptions {
    double mean_tol = 1e-9;
    std::optional<Interval> u1_support;  // claimed containment, if any
    std::optional<Interval> u2_support;
    bool monte_carlo = false;
    std::uint64_t seed = 20240817;
    std::size_t mc_samples = 100000;
    Exec exec = Exec::parallel;
};

// Certifies that u1 + u2 reproduces target: max CF residual over the fixed
// grid, mean additivity, exact pmf convolution when all three are finite
// discrete, optional seeded Monte-Carlo KS of sampled u1+u2 vs target CDF.
DecompositionReport verify_decomposition(const ScalarDist& target, const ScalarDist& u1,
                                         const ScalarDist& u2, double tol,
                                         const VerifyOptions& opts = {});

// Max over the fixed grid of |phi_target - phi_u1 phi_u2|.
double cf_max_residual(const ScalarDist& target, const ScalarDist& u1, const ScalarDist& u2,
                       Exec exec = Exec::parallel);

struct AppendixCRow {
    long n = 0;
    double value = 0.0;        // rearranged term b_n
    double mono_margin = 0.0;  // b_n - b_{n+1}
    double cond_margin = 0.0;  // certified lower bound on r_n - b_n
    bool analytic = false;     // condition margin from the geometric tail bound
};

struct AppendixCReport {
    std::vector<AppendixCRow> rows;
    bool pass = false;
};

// Verifies that the rearranged series is strictly decreasing and that each
// term is dominated by its remainder, for all n <= n_max. Small n are checked
// by direct summation; beyond that the remainder is lower-bounded analytically
// by its geometric part.
AppendixCReport check_appendix_c(long n_max);

// Truncated Bernoulli-series representations used by the splits above.
// [0,1]-supported dyadic series with prob 1/(1+e^{lambda 2^{-j}}), j=1..J.
BernoulliSeries dyadic_series_unit(double lambda, long J = 60);
// Two-sided series for Exp(lambda), indices -J_lo..J_hi.
BernoulliSeries dyadic_series_exp(double lambda, long J_lo, long J_hi);

}  // namespace oimac
