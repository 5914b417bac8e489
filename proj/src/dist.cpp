#include "oimac/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oimac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

std::complex<double> cis(double x) { return {std::cos(x), std::sin(x)}; }

// Uniform double in [0,1) with 53 random bits; stable across platforms.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require(bool ok, const char* msg) {
    if (!ok) throw DistError(msg);
}

double geom_entropy(double p) {
    const double q = 1.0 - p;
    return -(q * std::log(q) + p * std::log(p)) / p;
}

double truncgeom_entropy(double p, long K) {
    if (K == 1) return 0.0;
    const double lgq = std::log1p(-p);
    const double one_minus_qK = -std::expm1(static_cast<double>(K) * lgq);
    return std::log(one_minus_qK / p) - truncgeom_mean_index(p, K) * lgq;
}

}  // namespace

double truncgeom_mean_index(double success, long count) {
    // In terms of s = -log(1-success): E[j] = 1/(e^s - 1) - K/(e^{sK} - 1).
    const double K = static_cast<double>(count);
    const double s = -std::log1p(-success);
    if (s * K < 1e-4)  // the two reciprocals cancel; switch to the expansion
        return (K - 1.0) / 2.0 - (K * K - 1.0) * s / 12.0 +
               (K * K * K * K - 1.0) * s * s * s / 720.0;
    return 1.0 / std::expm1(s) - K / std::expm1(s * K);
}

double truncexp_mean(double width, double rate) {
    const double cv = width * rate;
    if (cv < 1e-5)  // series; the direct form cancels catastrophically
        return width / 2.0 - width * cv / 12.0 + width * cv * cv * cv / 720.0;
    return 1.0 / rate - width / std::expm1(cv);
}

double truncexp_entropy(double width, double rate) {
    const double cv = width * rate;
    // h = 1 - cv/(e^cv - 1) - log(rate) + log(1 - e^-cv)
    if (cv < 1e-6) return std::log(width) - cv * cv / 24.0;
    return 1.0 - cv / std::expm1(cv) - std::log(rate) + std::log(-std::expm1(-cv));
}

void validate(const ScalarDist& d) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                require(v.lo < v.hi, "Uniform: lo < hi required");
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                require(v.spacing > 0.0, "DiscreteUniformSpaced: spacing > 0");
                require(v.count >= 1, "DiscreteUniformSpaced: count >= 1");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                require(v.rate > 0.0, "Exponential: rate > 0");
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                require(v.width > 0.0 && v.rate > 0.0, "TruncExp: width, rate > 0");
            } else if constexpr (std::is_same_v<T, Geometric>) {
                require(v.success > 0.0 && v.success < 1.0, "Geometric: success in (0,1)");
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                require(v.success > 0.0 && v.success < 1.0, "TruncGeomSpaced: success in (0,1)");
                require(v.spacing > 0.0, "TruncGeomSpaced: spacing > 0");
                require(v.count >= 1, "TruncGeomSpaced: count >= 1");
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                require(v.atom_weight >= 0.0 && v.atom_weight <= 1.0,
                        "AtomPlusExponential: weight in [0,1]");
                require(v.rate > 0.0, "AtomPlusExponential: rate > 0");
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                require(v.atom_weight >= 0.0 && v.atom_weight <= 1.0,
                        "AtomPlusGeometric: weight in [0,1]");
                require(v.success > 0.0 && v.success < 1.0, "AtomPlusGeometric: success in (0,1)");
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                for (const auto& term : v.terms)
                    require(term.prob_one >= 0.0 && term.prob_one <= 1.0,
                            "BernoulliSeries: prob in [0,1]");
                require(v.tail_eps >= 0.0, "BernoulliSeries: tail_eps >= 0");
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                double total = 0.0;
                for (const auto& [x, p] : v.atoms) {
                    (void)x;
                    require(p >= 0.0 && p <= 1.0, "FiniteDiscrete: prob in [0,1]");
                    total += p;
                }
                require(std::abs(total - 1.0) <= 1e-12,
                        "FiniteDiscrete: probs must sum to 1 within 1e-12");
            }
        },
        d);
}

std::complex<double> cf_eval(const ScalarDist& d, double t) {
    using C = std::complex<double>;
    return std::visit(
        [t](const auto& v) -> C {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                const double half = 0.5 * (v.hi - v.lo);
                return cis(t * (v.lo + half)) * sinc(t * half);
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                const long K = v.count;
                const double th = t * v.spacing;
                if (std::abs(std::sin(0.5 * th)) < 1e-9) {
                    C acc{0.0, 0.0};
                    for (long j = 0; j < K; ++j)
                        acc += cis(t * (v.offset + v.spacing * static_cast<double>(j)));
                    return acc / static_cast<double>(K);
                }
                const double kernel =
                    std::sin(0.5 * K * th) / (K * std::sin(0.5 * th));
                return cis(t * (v.offset + 0.5 * v.spacing * (K - 1))) * kernel;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return v.rate / C{v.rate, -t};
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                // rate/(1-e^{-rate c}) * (e^{(it-rate)c} - 1)/(it - rate)
                const C itr{-v.rate, t};
                const C num = std::exp(itr * v.width) - 1.0;
                return (v.rate / -std::expm1(-v.rate * v.width)) * num / itr;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return v.success / (1.0 - (1.0 - v.success) * cis(t));
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                const double q = 1.0 - v.success;
                const long K = v.count;
                const double qK = std::pow(q, static_cast<double>(K));
                const C num = 1.0 - qK * cis(t * v.spacing * static_cast<double>(K));
                const C den = 1.0 - q * cis(t * v.spacing);
                return (v.success / (1.0 - qK)) * num / den;
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                return v.atom_weight + (1.0 - v.atom_weight) * (v.rate / C{v.rate, -t});
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                const C geo = v.success / (1.0 - (1.0 - v.success) * cis(t));
                return v.atom_weight + (1.0 - v.atom_weight) * geo;
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                C acc{1.0, 0.0};
                for (const auto& term : v.terms)
                    acc *= 1.0 - term.prob_one + term.prob_one * cis(t * term.value);
                return acc;
            } else {
                C acc{0.0, 0.0};
                for (const auto& [x, p] : v.atoms) acc += p * cis(t * x);
                return acc;
            }
        },
        d);
}

double mean(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return 0.5 * (v.lo + v.hi);
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                return v.offset + 0.5 * v.spacing * static_cast<double>(v.count - 1);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / v.rate;
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                return truncexp_mean(v.width, v.rate);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return (1.0 - v.success) / v.success;
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                return v.spacing * truncgeom_mean_index(v.success, v.count);
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                return (1.0 - v.atom_weight) / v.rate;
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                return (1.0 - v.atom_weight) * (1.0 - v.success) / v.success;
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                double acc = 0.0;
                for (const auto& term : v.terms) acc += term.value * term.prob_one;
                return acc;
            } else {
                double acc = 0.0;
                for (const auto& [x, p] : v.atoms) acc += x * p;
                return acc;
            }
        },
        d);
}

double entropy(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return std::log(v.hi - v.lo);
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                return std::log(static_cast<double>(v.count));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 - std::log(v.rate);
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                return truncexp_entropy(v.width, v.rate);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return geom_entropy(v.success);
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                return truncgeom_entropy(v.success, v.count);
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                throw MixedDistribution("entropy undefined for atom+continuous mixture");
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                const double w = v.atom_weight, p = v.success, q = 1.0 - p;
                if (w >= 1.0) return 0.0;
                const double p0 = w + (1.0 - w) * p;
                return -p0 * std::log(p0) -
                       (1.0 - w) * q * (std::log((1.0 - w) * p) + std::log(q) / p);
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                throw NotSupported("entropy not computed for BernoulliSeries");
            } else {
                double acc = 0.0;
                for (const auto& [x, p] : v.atoms) {
                    (void)x;
                    if (p > 0.0) acc -= p * std::log(p);
                }
                return acc;
            }
        },
        d);
}

double cdf(const ScalarDist& d, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= v.lo) return 0.0;
                if (x >= v.hi) return 1.0;
                return (x - v.lo) / (v.hi - v.lo);
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                const double j = std::floor((x - v.offset) / v.spacing + 1e-12);
                if (j < 0.0) return 0.0;
                const double n = std::min(j + 1.0, static_cast<double>(v.count));
                return n / static_cast<double>(v.count);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return x <= 0.0 ? 0.0 : -std::expm1(-v.rate * x);
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                if (x <= 0.0) return 0.0;
                if (x >= v.width) return 1.0;
                return std::expm1(-v.rate * x) / std::expm1(-v.rate * v.width);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (x < 0.0) return 0.0;
                const double k = std::floor(x + 1e-12);
                return -std::expm1((k + 1.0) * std::log1p(-v.success));
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                const double j = std::floor(x / v.spacing + 1e-12);
                if (j < 0.0) return 0.0;
                if (j >= static_cast<double>(v.count - 1)) return 1.0;
                const double lq = std::log1p(-v.success);
                return std::expm1((j + 1.0) * lq) / std::expm1(static_cast<double>(v.count) * lq);
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                if (x < 0.0) return 0.0;
                return v.atom_weight + (1.0 - v.atom_weight) * -std::expm1(-v.rate * x);
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                if (x < 0.0) return 0.0;
                const double k = std::floor(x + 1e-12);
                const double g = -std::expm1((k + 1.0) * std::log1p(-v.success));
                return v.atom_weight + (1.0 - v.atom_weight) * g;
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                throw NotSupported("cdf not available for BernoulliSeries");
            } else {
                auto atoms = v.atoms;
                std::sort(atoms.begin(), atoms.end());
                double acc = 0.0;
                for (const auto& [pt, p] : atoms)
                    if (pt <= x + 1e-12) acc += p;
                return std::min(acc, 1.0);
            }
        },
        d);
}

std::vector<double> sample(const ScalarDist& d, std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            for (std::size_t i = 0; i < n; ++i) {
                if constexpr (std::is_same_v<T, Uniform>) {
                    out[i] = v.lo + (v.hi - v.lo) * canonical(rng);
                } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                    const long j = std::min<long>(
                        v.count - 1,
                        static_cast<long>(canonical(rng) * static_cast<double>(v.count)));
                    out[i] = v.offset + v.spacing * static_cast<double>(j);
                } else if constexpr (std::is_same_v<T, Exponential>) {
                    out[i] = -std::log1p(-canonical(rng)) / v.rate;
                } else if constexpr (std::is_same_v<T, TruncExp>) {
                    const double u = canonical(rng);
                    out[i] = -std::log1p(u * std::expm1(-v.rate * v.width)) / v.rate;
                } else if constexpr (std::is_same_v<T, Geometric>) {
                    const double u = canonical(rng);
                    out[i] = std::floor(std::log1p(-u) / std::log1p(-v.success));
                } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                    const double u = canonical(rng);
                    const double lq = std::log1p(-v.success);
                    const double mass = std::expm1(static_cast<double>(v.count) * lq);
                    double j = std::floor(std::log1p(u * mass) / lq);
                    j = std::clamp(j, 0.0, static_cast<double>(v.count - 1));
                    out[i] = v.spacing * j;
                } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                    const double u = canonical(rng);
                    const double e = -std::log1p(-canonical(rng)) / v.rate;
                    out[i] = u < v.atom_weight ? 0.0 : e;
                } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                    const double u = canonical(rng);
                    const double g =
                        std::floor(std::log1p(-canonical(rng)) / std::log1p(-v.success));
                    out[i] = u < v.atom_weight ? 0.0 : g;
                } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                    double acc = 0.0;
                    for (const auto& term : v.terms)
                        if (canonical(rng) < term.prob_one) acc += term.value;
                    out[i] = acc;
                } else {
                    const double u = canonical(rng);
                    double c = 0.0;
                    double val = v.atoms.empty() ? 0.0 : v.atoms.back().first;
                    for (const auto& [x, p] : v.atoms) {
                        c += p;
                        if (u < c) {
                            val = x;
                            break;
                        }
                    }
                    out[i] = val;
                }
            }
        },
        d);
    return out;
}

bool is_discrete(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            return std::is_same_v<T, DiscreteUniformSpaced> || std::is_same_v<T, Geometric> ||
                   std::is_same_v<T, TruncGeomSpaced> || std::is_same_v<T, AtomPlusGeometric> ||
                   std::is_same_v<T, FiniteDiscrete>;
        },
        d);
}

Interval support_interval(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> Interval {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return {v.lo, v.hi};
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                return {v.offset, v.offset + v.spacing * static_cast<double>(v.count - 1)};
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                return {0.0, v.width};
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                return {0.0, v.spacing * static_cast<double>(v.count - 1)};
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                double lo = 0.0, hi = 0.0;
                for (const auto& term : v.terms)
                    (term.value < 0.0 ? lo : hi) += term.value;
                return {lo, hi};
            } else {
                double lo = kInf, hi = -kInf;
                for (const auto& [x, p] : v.atoms) {
                    (void)p;
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
                if (v.atoms.empty()) lo = hi = 0.0;
                return {lo, hi};
            }
        },
        d);
}

std::optional<std::vector<std::pair<double, double>>> finite_atoms(const ScalarDist& d) {
    using Atoms = std::vector<std::pair<double, double>>;
    return std::visit(
        [](const auto& v) -> std::optional<Atoms> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                Atoms atoms;
                for (long j = 0; j < v.count; ++j)
                    atoms.emplace_back(v.offset + v.spacing * static_cast<double>(j),
                                       1.0 / static_cast<double>(v.count));
                return atoms;
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                Atoms atoms;
                const double q = 1.0 - v.success;
                const double norm =
                    v.success / -std::expm1(static_cast<double>(v.count) * std::log1p(-v.success));
                double qj = 1.0;
                for (long j = 0; j < v.count; ++j) {
                    atoms.emplace_back(v.spacing * static_cast<double>(j), norm * qj);
                    qj *= q;
                }
                return atoms;
            } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
                return v.atoms;
            } else {
                return std::nullopt;
            }
        },
        d);
}

std::string kind_name(const ScalarDist& d) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) return "uniform";
            else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) return "discrete_uniform_spaced";
            else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
            else if constexpr (std::is_same_v<T, TruncExp>) return "trunc_exp";
            else if constexpr (std::is_same_v<T, Geometric>) return "geometric";
            else if constexpr (std::is_same_v<T, TruncGeomSpaced>) return "trunc_geom_spaced";
            else if constexpr (std::is_same_v<T, AtomPlusExponential>) return "atom_plus_exponential";
            else if constexpr (std::is_same_v<T, AtomPlusGeometric>) return "atom_plus_geometric";
            else if constexpr (std::is_same_v<T, BernoulliSeries>) return "bernoulli_series";
            else return "finite_discrete";
        },
        d);
}

double ks_statistic(std::vector<double> samples, const ScalarDist& d) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    // Tied samples (atoms) are compared as one jump: the empirical CDF right
    // after the run against F(v), and right before it against F(v-).
    std::size_t i = 0;
    while (i < samples.size()) {
        const double v = samples[i];
        std::size_t j = i;
        while (j < samples.size() && samples[j] == v) ++j;
        const double F = cdf(d, v);
        const double F_left = cdf(d, v - 1e-9 * std::max(1.0, std::abs(v)));
        worst = std::max(worst, std::abs(static_cast<double>(j) / n - F));
        worst = std::max(worst, std::abs(static_cast<double>(i) / n - F_left));
        i = j;
    }
    return worst;
}

}  // namespace oimac
