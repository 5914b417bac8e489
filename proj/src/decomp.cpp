#include "oimac/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oimac {

namespace {

constexpr std::size_t kMaxGreedySelections = 10000;

double pow2(long j) { return std::ldexp(1.0, static_cast<int>(j)); }

// Bernoulli success probability for the dyadic exponential series.
double exp_series_prob(long j, double lambda) {
    const double x = lambda * pow2(j);
    if (x > 745.0) return 0.0;  // e^x overflows; true prob < 1e-323
    return 1.0 / (1.0 + std::exp(x));
}

// CF contribution bound of a dropped term on the verification grid:
// |1 - phi_j(t)| <= prob * min(2, |t| value).
double dropped_term_cf_bound(double value, double prob) {
    return prob * std::min(2.0, kCfGridHi * std::abs(value));
}

ScalarDist finite_or_series(std::vector<BernoulliTerm> terms, double tail_eps) {
    BernoulliSeries s;
    s.terms = std::move(terms);
    s.tail_eps = tail_eps;
    return s;
}

std::vector<std::pair<double, double>> convolve_atoms(
    const std::vector<std::pair<double, double>>& a,
    const std::vector<std::pair<double, double>>& b) {
    std::vector<std::pair<double, double>> out;
    out.reserve(a.size() * b.size());
    for (const auto& [xa, pa] : a)
        for (const auto& [xb, pb] : b) out.emplace_back(xa + xb, pa * pb);
    std::sort(out.begin(), out.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [x, p] : out) {
        if (!merged.empty() && std::abs(x - merged.back().first) <= 1e-9 * std::max(1.0, std::abs(x)))
            merged.back().second += p;
        else
            merged.emplace_back(x, p);
    }
    return merged;
}

}  // namespace

double exp_series_term(long j, double lambda) {
    return pow2(j) * exp_series_prob(j, lambda);
}

IndexSet subsum_greedy(const std::vector<double>& terms, double tail_sum, double target) {
    const std::size_t n = terms.size();
    std::vector<double> suffix(n + 1, 0.0);
    suffix[n] = tail_sum;
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + terms[i];

    for (std::size_t i = 0; i < n; ++i) {
        if (terms[i] <= 0.0) throw ConditionViolated("subsum_greedy: terms must be positive");
        if (i + 1 < n && !(terms[i] > terms[i + 1]))
            throw ConditionViolated("subsum_greedy: terms must be strictly decreasing");
        if (terms[i] > suffix[i + 1] * (1.0 + 1e-9) + 1e-300)
            throw ConditionViolated("subsum_greedy: term exceeds its remainder");
    }
    const double total = suffix[0];
    if (target < -1e-12 || target > total * (1.0 + 1e-12) + 1e-12)
        throw TargetOutOfRange("subsum_greedy: target outside [0, sum]");

    IndexSet out;
    out.target = target;
    double partial = 0.0;
    std::size_t selected = 0;
    for (std::size_t i = 0; i < n && selected < kMaxGreedySelections; ++i) {
        const double slack = 4e-16 * std::max(1.0, std::abs(target));
        if (partial + terms[i] <= target + slack) {
            partial += terms[i];
            out.indices.push_back(static_cast<long>(i));
            ++selected;
            if (target - partial <= 0.0) break;
        }
    }
    out.achieved_sum = partial;
    out.residual = std::abs(partial - target);
    return out;
}

RearrangedSeries exp_rearranged_series(std::size_t depth) {
    // Entry -> source indices of the two-sided series. Singles first, sorted
    // decreasing; from depth 6 onward the doubly-exponential side rides along
    // with its geometric partner, except the +3 term which is placed at its
    // own sorted slot (keeping it merged would break the domination
    // condition: its partner's remainder is smaller than the pair).
    RearrangedSeries s;
    s.terms.reserve(depth);
    s.z_indices.reserve(depth);
    auto push = [&](std::vector<long> idx) {
        double v = 0.0;
        for (long j : idx) v += exp_series_term(j);
        s.terms.push_back(v);
        s.z_indices.push_back(std::move(idx));
    };
    static const std::vector<std::vector<long>> head = {
        {0}, {1}, {-1}, {-2}, {2}, {-3}, {-4, 4}, {-5, 5}, {-6, 6}, {-7, 7}, {3}};
    for (std::size_t n = 0; n < depth; ++n) {
        if (n < head.size())
            push(head[n]);
        else {
            const long m = static_cast<long>(n) - 3;
            push({-m, m});
        }
    }
    // Tail beyond the stored depth: sum over m >= depth-3 of both sides,
    // bounded below is not needed here; the stored value is an upper bound
    // accurate to ~2^-(depth-3): geometric side sums to 2^{-(depth-4)} * ~1/2.
    const long m0 = static_cast<long>(depth) - 3;
    s.tail_sum = pow2(-m0 + 1) * 0.5;  // sum_{m>=m0} 2^{-m}/2 * (1+o(1))
    return s;
}

std::vector<long> binary_digit_indices(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DecompError("binary expansion needs a in (0,1)");
    std::vector<long> idx;
    double frac = a;
    for (long j = 1; frac > 0.0 && j <= 1100; ++j) {
        frac *= 2.0;  // exact for binary doubles
        if (frac >= 1.0) {
            idx.push_back(j);
            frac -= 1.0;
        }
    }
    return idx;
}

BernoulliSeries dyadic_series_unit(double lambda, long J) {
    BernoulliSeries s;
    for (long j = 1; j <= J; ++j)
        s.terms.push_back({pow2(-j), 1.0 / (1.0 + std::exp(lambda * pow2(-j)))});
    s.tail_eps = dropped_term_cf_bound(pow2(-J), 0.5) * 2.0;  // sum over j > J
    return s;
}

BernoulliSeries dyadic_series_exp(double lambda, long J_lo, long J_hi) {
    BernoulliSeries s;
    for (long j = -J_lo; j <= J_hi; ++j) {
        const double p = exp_series_prob(j, lambda);
        if (p > 0.0) s.terms.push_back({pow2(j), p});
    }
    // Below -J_lo the values shrink geometrically at probability ~1/2; above
    // J_hi the probabilities decay doubly exponentially.
    double tail = dropped_term_cf_bound(pow2(-J_lo), 0.5) * 2.0;
    tail += 4.0 * exp_series_prob(J_hi + 1, lambda);
    s.tail_eps = tail;
    return s;
}

Decomposition decompose_uniform_binary(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DecompError("decompose_uniform_binary: a in (0,1)");
    const auto digits = binary_digit_indices(a);
    const long J = std::max<long>(60, digits.empty() ? 1 : digits.back());
    std::vector<BernoulliTerm> t1, t2;
    std::size_t pos = 0;
    for (long j = 1; j <= J; ++j) {
        const bool in_set = pos < digits.size() && digits[pos] == j;
        if (in_set) ++pos;
        (in_set ? t1 : t2).push_back({pow2(-j), 0.5});
    }
    Decomposition d;
    d.target = Uniform{0.0, 1.0};
    d.u1 = finite_or_series(std::move(t1), 0.0);  // digit set is finite
    d.u2 = finite_or_series(std::move(t2), dropped_term_cf_bound(pow2(-J), 0.5) * 2.0);
    return d;
}

Decomposition decompose_uniform_contracted(long k) {
    if (k < 2) throw DecompError("decompose_uniform_contracted: k >= 2");
    Decomposition d;
    d.target = Uniform{0.0, 1.0};
    d.u1 = Uniform{0.0, 1.0 / static_cast<double>(k)};
    d.u2 = DiscreteUniformSpaced{0.0, 1.0 / static_cast<double>(k), k};
    return d;
}

Decomposition decompose_exp_verdu(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DecompError("decompose_exp_verdu: a in (0,1)");
    Decomposition d;
    d.target = Exponential{1.0};
    d.u1 = Exponential{1.0 / a};
    d.u2 = AtomPlusExponential{a, 1.0};
    return d;
}

Decomposition decompose_exp_binary(double a) {
    if (!(a > 0.0 && a < 1.0)) throw TargetOutOfRange("decompose_exp_binary: a in (0,1)");
    const auto series = exp_rearranged_series();
    IndexSet picked = subsum_greedy(series.terms, series.tail_sum, a);

    IndexSet zset;
    zset.target = picked.target;
    zset.achieved_sum = picked.achieved_sum;
    zset.residual = picked.residual;
    for (long entry : picked.indices)
        for (long j : series.z_indices[static_cast<std::size_t>(entry)])
            zset.indices.push_back(j);
    std::sort(zset.indices.begin(), zset.indices.end());

    constexpr long kWindowLo = -64, kWindowHi = 9;
    std::vector<BernoulliTerm> t1, t2;
    std::size_t pos = 0;
    for (long j = kWindowLo; j <= kWindowHi; ++j) {
        while (pos < zset.indices.size() && zset.indices[pos] < j) ++pos;
        const bool in_set = pos < zset.indices.size() && zset.indices[pos] == j;
        const double p = exp_series_prob(j, 1.0);
        if (p <= 0.0) continue;
        (in_set ? t1 : t2).push_back({pow2(j), p});
    }
    const double tail =
        dropped_term_cf_bound(pow2(kWindowLo), 0.5) * 2.0 + 4.0 * exp_series_prob(kWindowHi + 1, 1.0);
    Decomposition d;
    d.target = Exponential{1.0};
    d.u1 = finite_or_series(std::move(t1), tail);
    d.u2 = finite_or_series(std::move(t2), tail);
    d.index_set = std::move(zset);
    return d;
}

Decomposition decompose_truncexp_binary(double a, double lambda) {
    if (!(a > 0.0 && a < 1.0)) throw DecompError("decompose_truncexp_binary: a in (0,1)");
    if (!(lambda > 0.0)) throw DecompError("decompose_truncexp_binary: lambda > 0");
    const auto digits = binary_digit_indices(a);
    const long J = std::max<long>(60, digits.empty() ? 1 : digits.back());
    std::vector<BernoulliTerm> t1, t2;
    std::size_t pos = 0;
    for (long j = 1; j <= J; ++j) {
        const bool in_set = pos < digits.size() && digits[pos] == j;
        if (in_set) ++pos;
        (in_set ? t1 : t2).push_back({pow2(-j), 1.0 / (1.0 + std::exp(lambda * pow2(-j)))});
    }
    Decomposition d;
    d.target = TruncExp{1.0, lambda};
    d.u1 = finite_or_series(std::move(t1), 0.0);
    d.u2 = finite_or_series(std::move(t2), dropped_term_cf_bound(pow2(-J), 0.5) * 2.0);
    return d;
}

Decomposition decompose_truncexp_contracted(long k, double lambda) {
    if (k < 2) throw DecompError("decompose_truncexp_contracted: k >= 2");
    if (!(lambda > 0.0)) throw DecompError("decompose_truncexp_contracted: lambda > 0");
    const double kk = static_cast<double>(k);
    Decomposition d;
    d.target = TruncExp{1.0, lambda};
    d.u1 = TruncExp{1.0 / kk, lambda};
    d.u2 = TruncGeomSpaced{-std::expm1(-lambda / kk), 1.0 / kk, k};
    return d;
}

Decomposition decompose_discrete_uniform(long k1, long n) {
    if (k1 < 1) throw DecompError("decompose_discrete_uniform: k1 >= 1");
    if (n < 2) throw DivisibilityViolated("decompose_discrete_uniform: n >= 2 required");
    Decomposition d;
    d.target = DiscreteUniformSpaced{0.0, 1.0, n * (k1 + 1)};
    d.u1 = DiscreteUniformSpaced{0.0, 1.0, k1 + 1};
    d.u2 = DiscreteUniformSpaced{0.0, static_cast<double>(k1 + 1), n};
    return d;
}

Decomposition decompose_geometric(double lambda, double lambda1) {
    if (!(lambda > 0.0 && lambda < 1.0 && lambda1 > 0.0 && lambda1 < 1.0))
        throw DecompError("decompose_geometric: parameters in (0,1)");
    if (!(lambda < lambda1))
        throw ParameterOrderViolated("decompose_geometric: lambda < lambda1 required");
    const double w = (lambda / lambda1) * (1.0 - lambda1) / (1.0 - lambda);
    Decomposition d;
    d.target = Geometric{lambda};
    d.u1 = Geometric{lambda1};
    d.u2 = AtomPlusGeometric{w, lambda};
    return d;
}

Decomposition decompose_truncgeom(long k1, long n, double lambda) {
    if (k1 < 1) throw DecompError("decompose_truncgeom: k1 >= 1");
    if (n < 2) throw DivisibilityViolated("decompose_truncgeom: n >= 2 required");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DecompError("decompose_truncgeom: lambda in (0,1)");
    const double p2 = -std::expm1(static_cast<double>(k1 + 1) * std::log1p(-lambda));
    Decomposition d;
    d.target = TruncGeomSpaced{lambda, 1.0, n * (k1 + 1)};
    d.u1 = TruncGeomSpaced{lambda, 1.0, k1 + 1};
    d.u2 = TruncGeomSpaced{p2, static_cast<double>(k1 + 1), n};
    return d;
}

double cf_max_residual(const ScalarDist& target, const ScalarDist& u1, const ScalarDist& u2,
                       Exec exec) {
    std::vector<double> res(kCfGridPoints);
    grid_apply(kCfGridPoints, exec, [&](std::size_t i) {
        const double t =
            kCfGridLo + (kCfGridHi - kCfGridLo) * static_cast<double>(i) / (kCfGridPoints - 1);
        res[i] = std::abs(cf_eval(target, t) - cf_eval(u1, t) * cf_eval(u2, t));
    });
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, r);
    return worst;
}

DecompositionReport verify_decomposition(const ScalarDist& target, const ScalarDist& u1,
                                         const ScalarDist& u2, double tol,
                                         const VerifyOptions& opts) {
    validate(target);
    validate(u1);
    validate(u2);
    DecompositionReport rep;
    rep.tolerance = tol;
    rep.cf_max_residual = cf_max_residual(target, u1, u2, opts.exec);
    rep.mean_sum_residual = std::abs(mean(u1) + mean(u2) - mean(target));

    rep.checks.push_back(
        {"cf_residual_within_tol", rep.cf_max_residual <= tol, tol - rep.cf_max_residual});
    rep.checks.push_back({"mean_additivity", rep.mean_sum_residual <= opts.mean_tol,
                          opts.mean_tol - rep.mean_sum_residual});

    auto containment = [&](const char* name, const ScalarDist& u, const Interval& claim) {
        const Interval sup = support_interval(u);
        const double margin = std::min(sup.lo - claim.lo, claim.hi - sup.hi);
        rep.checks.push_back({name, margin >= -1e-12, margin});
    };
    if (opts.u1_support) containment("u1_support_containment", u1, *opts.u1_support);
    if (opts.u2_support) containment("u2_support_containment", u2, *opts.u2_support);

    const auto ta = finite_atoms(target);
    const auto a1 = finite_atoms(u1);
    const auto a2 = finite_atoms(u2);
    if (ta && a1 && a2) {
        const auto conv = convolve_atoms(*a1, *a2);
        double worst = 0.0;
        bool aligned = conv.size() == ta->size();
        if (aligned) {
            auto sorted_target = *ta;
            std::sort(sorted_target.begin(), sorted_target.end());
            for (std::size_t i = 0; i < conv.size(); ++i) {
                if (std::abs(conv[i].first - sorted_target[i].first) >
                    1e-9 * std::max(1.0, std::abs(conv[i].first))) {
                    aligned = false;
                    break;
                }
                worst = std::max(worst, std::abs(conv[i].second - sorted_target[i].second));
            }
        }
        rep.checks.push_back({"exact_convolution", aligned && worst <= 1e-14, 1e-14 - worst});
    }

    if (opts.monte_carlo) {
        const auto s1 = sample(u1, opts.seed, opts.mc_samples);
        const auto s2 = sample(u2, opts.seed + 1, opts.mc_samples);
        std::vector<double> sums(opts.mc_samples);
        for (std::size_t i = 0; i < opts.mc_samples; ++i) sums[i] = s1[i] + s2[i];
        const double ks = ks_statistic(std::move(sums), target);
        rep.mc_ks = ks;
        const double crit = 1.628 / std::sqrt(static_cast<double>(opts.mc_samples));
        rep.checks.push_back({"mc_ks_1pct", ks < crit, crit - ks});
    }

    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.satisfied;
    return rep;
}

AppendixCReport check_appendix_c(long n_max) {
    if (n_max < 7) throw DecompError("check_appendix_c: n_max >= 7");
    const auto series = exp_rearranged_series(static_cast<std::size_t>(n_max) + 2);
    // Total of the two-sided series; the identity sum = 1 is certified
    // elsewhere, here partial sums against it give the small-n remainders.
    double prefix = 0.0;
    AppendixCReport rep;
    rep.pass = true;
    constexpr long kDirectLimit = 10;  // direct remainders; analytic beyond
    for (long n = 0; n <= n_max; ++n) {
        const auto& term = series.terms[static_cast<std::size_t>(n)];
        prefix += term;
        AppendixCRow row;
        row.n = n;
        row.value = term;
        row.mono_margin = term - series.terms[static_cast<std::size_t>(n + 1)];
        if (n <= kDirectLimit) {
            row.cond_margin = (1.0 - prefix) - term;
            row.analytic = false;
        } else {
            // remainder > a_{-(m)} + (1/18) 4^{-m} with m = n-3, so
            // r_n - b_n > (1/18) 4^{-m} - a_m.
            const long m = n - 3;
            const double bound = std::ldexp(1.0 / 18.0, static_cast<int>(-2 * m));
            row.cond_margin = bound - exp_series_term(m);
            row.analytic = true;
        }
        rep.pass = rep.pass && row.mono_margin > 0.0 && row.cond_margin >= 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace oimac
