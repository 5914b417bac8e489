#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// Scalar distributions used by the decomposition and capacity machinery:
// closed-form characteristic functions, means, entropies, CDFs and seeded
// sampling. All values are immutable after construction and every operation
// is pure, so concurrent use is safe.

namespace oimac {

struct DistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Entropy is undefined for atom+continuous mixtures.
struct MixedDistribution : DistError {
    using DistError::DistError;
};
struct NotSupported : DistError {
    using DistError::DistError;
};

struct Uniform {
    double lo = 0.0, hi = 1.0;
};

struct DiscreteUniformSpaced {
    double offset = 0.0;
    double spacing = 1.0;  // > 0
    long count = 1;        // >= 1
};

struct Exponential {
    double rate = 1.0;  // > 0
};

// Density rate*exp(-rate*u)/(1-exp(-rate*width)) on [0, width].
struct TruncExp {
    double width = 1.0;  // > 0
    double rate = 1.0;   // > 0
};

// pmf p(1-p)^k on k = 0, 1, 2, ...
struct Geometric {
    double success = 0.5;  // in (0,1)
};

// Atoms at {0, d, ..., (count-1) d} with pmf proportional to (1-p)^j.
struct TruncGeomSpaced {
    double success = 0.5;  // in (0,1)
    double spacing = 1.0;  // > 0
    long count = 1;        // >= 1
};

// w * delta_0 + (1-w) * Exponential{rate}.
struct AtomPlusExponential {
    double atom_weight = 0.5;  // in [0,1]
    double rate = 1.0;
};

// w * delta_0 + (1-w) * Geometric{success}; purely discrete.
struct AtomPlusGeometric {
    double atom_weight = 0.5;
    double success = 0.5;
};

struct BernoulliTerm {
    double value = 0.0;
    double prob_one = 0.5;
};

// Distribution of sum value_j * B_j over independent Bernoulli B_j.
// Truncated representation: tail_eps bounds the total contribution of the
// omitted terms to the characteristic function on the verification grid
// (each omitted term contributes at most p*min(2, |t|*value)).
struct BernoulliSeries {
    std::vector<BernoulliTerm> terms;
    double tail_eps = 0.0;
};

struct FiniteDiscrete {
    std::vector<std::pair<double, double>> atoms;  // (point, prob)
};

using ScalarDist =
    std::variant<Uniform, DiscreteUniformSpaced, Exponential, TruncExp,
                 Geometric, TruncGeomSpaced, AtomPlusExponential,
                 AtomPlusGeometric, BernoulliSeries, FiniteDiscrete>;

struct GaussianNoise {
    double sigma = 1.0;  // > 0
    double snr() const { return 1.0 / sigma; }
};

// Throws DistError when parameters are outside their domains
// (probabilities outside [0,1], nonpositive rates/spacings,
// FiniteDiscrete probabilities not summing to 1 within 1e-12).
void validate(const ScalarDist& d);

std::complex<double> cf_eval(const ScalarDist& d, double t);
double mean(const ScalarDist& d);

// Shannon entropy for discrete variants, differential entropy for
// continuous ones (nats). Mixtures with both an atom and a density are
// rejected; BernoulliSeries entropy is generally singular and not computed.
double entropy(const ScalarDist& d);

// P(X <= x). Not available for BernoulliSeries.
double cdf(const ScalarDist& d, double x);

// n i.i.d. draws, deterministic in (seed, n) across platforms.
std::vector<double> sample(const ScalarDist& d, std::uint64_t seed, std::size_t n);

bool is_discrete(const ScalarDist& d);

struct Interval {
    double lo = 0.0, hi = 0.0;
};
// Smallest closed interval containing the support (hi may be +inf).
Interval support_interval(const ScalarDist& d);

// Atom list for purely discrete distributions with finitely many atoms;
// nullopt otherwise.
std::optional<std::vector<std::pair<double, double>>> finite_atoms(const ScalarDist& d);

std::string kind_name(const ScalarDist& d);

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
double ks_statistic(std::vector<double> samples, const ScalarDist& d);

// Closed forms shared with the capacity bounds: mean and differential
// entropy of the truncated exponential on [0, width] with the given rate.
double truncexp_mean(double width, double rate);
double truncexp_entropy(double width, double rate);

// E[j] of count atoms with pmf proportional to (1-success)^j, j >= 0.
// Stable down to success -> 0 (uniform limit (count-1)/2).
double truncgeom_mean_index(double success, long count);

}  // namespace oimac
