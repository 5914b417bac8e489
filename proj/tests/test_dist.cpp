#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oimac/capacity.hpp"
#include "oimac/decomp.hpp"
#include "oimac/dist.hpp"
#include "oimac/dist_json.hpp"

#include <cmath>
#include <complex>
#include <functional>

using namespace oimac;
using C = std::complex<double>;

namespace {

// Adaptive Simpson quadrature, the independent oracle for CF and mean checks.
C simpson(const std::function<C(double)>& f, double a, double b, C fa, C fb, C fm, double tol,
          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const C flm = f(lm), frm = f(rm);
    const C left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const C right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const C whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, fm, flm, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, fb, frm, tol / 2.0, depth - 1);
}

C integrate(const std::function<C(double)>& f, double a, double b, double tol = 1e-13) {
    const C fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fb, fm, tol, 48);
}

// density of the continuous variants (on their support)
double pdf(const ScalarDist& d, double x) {
    if (const auto* u = std::get_if<Uniform>(&d)) return 1.0 / (u->hi - u->lo);
    if (const auto* e = std::get_if<Exponential>(&d)) return e->rate * std::exp(-e->rate * x);
    if (const auto* t = std::get_if<TruncExp>(&d))
        return t->rate * std::exp(-t->rate * x) / -std::expm1(-t->rate * t->width);
    REQUIRE(false);
    return 0.0;
}

// CF by quadrature (continuous) or direct summation (discrete / mixtures).
C cf_oracle(const ScalarDist& d, double t) {
    if (std::holds_alternative<Uniform>(d) || std::holds_alternative<TruncExp>(d) ||
        std::holds_alternative<Exponential>(d)) {
        Interval s = support_interval(d);
        if (std::isinf(s.hi)) s.hi = 60.0 / std::get<Exponential>(d).rate;
        auto f = [&](double x) { return pdf(d, x) * C{std::cos(t * x), std::sin(t * x)}; };
        return integrate(f, s.lo, s.hi);
    }
    if (const auto* g = std::get_if<Geometric>(&d)) {
        C acc{};
        double pk = g->success;
        for (int k = 0; k < 4000 && pk > 1e-19; ++k) {
            acc += pk * C{std::cos(t * k), std::sin(t * k)};
            pk *= 1.0 - g->success;
        }
        return acc;
    }
    if (const auto* m = std::get_if<AtomPlusExponential>(&d)) {
        return m->atom_weight +
               (1.0 - m->atom_weight) * cf_oracle(Exponential{m->rate}, t);
    }
    if (const auto* m = std::get_if<AtomPlusGeometric>(&d)) {
        return m->atom_weight + (1.0 - m->atom_weight) * cf_oracle(Geometric{m->success}, t);
    }
    auto atoms = finite_atoms(d);
    REQUIRE(atoms.has_value());
    C acc{};
    for (const auto& [x, p] : *atoms) acc += p * C{std::cos(t * x), std::sin(t * x)};
    return acc;
}

double mean_oracle(const ScalarDist& d) {
    if (std::holds_alternative<Uniform>(d) || std::holds_alternative<TruncExp>(d) ||
        std::holds_alternative<Exponential>(d)) {
        Interval s = support_interval(d);
        if (std::isinf(s.hi)) s.hi = 60.0 / std::get<Exponential>(d).rate;
        return integrate([&](double x) { return C{x * pdf(d, x), 0.0}; }, s.lo, s.hi).real();
    }
    if (const auto* g = std::get_if<Geometric>(&d)) {
        double acc = 0.0, pk = g->success;
        for (int k = 0; k < 4000 && pk > 1e-19; ++k) {
            acc += k * pk;
            pk *= 1.0 - g->success;
        }
        return acc;
    }
    if (const auto* m = std::get_if<AtomPlusExponential>(&d))
        return (1.0 - m->atom_weight) * mean_oracle(Exponential{m->rate});
    if (const auto* m = std::get_if<AtomPlusGeometric>(&d))
        return (1.0 - m->atom_weight) * mean_oracle(Geometric{m->success});
    auto atoms = finite_atoms(d);
    REQUIRE(atoms.has_value());
    double acc = 0.0;
    for (const auto& [x, p] : *atoms) acc += x * p;
    return acc;
}

std::vector<ScalarDist> closed_form_zoo() {
    return {
        Uniform{0.0, 1.0},
        Uniform{0.25, 1.75},
        DiscreteUniformSpaced{0.0, 1.0 / 3.0, 3},
        DiscreteUniformSpaced{0.5, 0.125, 9},
        Exponential{1.0},
        Exponential{2.5},
        TruncExp{1.0, 1.0},
        TruncExp{0.25, 2.0},
        Geometric{0.3},
        TruncGeomSpaced{0.36, 0.5, 4},
        AtomPlusExponential{0.25, 1.0},
        AtomPlusGeometric{0.25, 0.2},
        FiniteDiscrete{{{0.0, 0.125}, {0.5, 0.5}, {0.75, 0.375}}},
    };
}

}  // namespace

TEST_CASE("cf matches quadrature/summation oracle on integer t in [-10,10]") {
    for (const auto& d : closed_form_zoo()) {
        validate(d);
        for (int t = -10; t <= 10; ++t) {
            INFO(kind_name(d), " t=", t);
            CHECK(std::abs(cf_eval(d, t) - cf_oracle(d, t)) <= 1e-8);
        }
    }
}

TEST_CASE("cf closed forms: unit uniform and normalization at t=0") {
    for (double t : {-7.5, -1.0, 0.5, 3.0, 31.0}) {
        const C direct = (C{std::cos(t), std::sin(t)} - 1.0) / C{0.0, t};
        CHECK(std::abs(cf_eval(Uniform{0.0, 1.0}, t) - direct) <= 1e-14);
    }
    for (const auto& d : closed_form_zoo()) {
        CHECK(std::abs(cf_eval(d, 0.0) - 1.0) <= 1e-14);
    }
    // frozen quadrature value of the [0,1] truncated exponential at t=1
    const C frozen{0.87862493142543577, 0.38890841876084716};
    CHECK(std::abs(cf_eval(TruncExp{1.0, 1.0}, 1.0) - frozen) <= 1e-10);
}

TEST_CASE("mean: closed forms vs integration/summation oracle") {
    CHECK(mean(Uniform{0.0, 1.0}) == 0.5);
    CHECK(mean(Geometric{0.3}) == doctest::Approx(7.0 / 3.0).epsilon(1e-10));
    for (const auto& d : closed_form_zoo()) {
        INFO(kind_name(d));
        CHECK(std::abs(mean(d) - mean_oracle(d)) <= 1e-9);
    }
}

TEST_CASE("mean of the truncated exponential equals the capacity-side closed form") {
    for (double c : {0.2, 0.5, 1.0}) {
        for (double v : {0.3, 1.0, 4.0}) {
            CHECK(mean(TruncExp{c, v}) == doctest::Approx(fn_f(c, v)).epsilon(1e-13));
        }
    }
}

TEST_CASE("entropy closed forms") {
    CHECK(entropy(DiscreteUniformSpaced{0.0, 0.4, 7}) == doctest::Approx(std::log(7.0)));
    CHECK(entropy(Uniform{0.0, 1.0}) == 0.0);
    CHECK(entropy(Exponential{1.0}) == doctest::Approx(1.0));
    for (double c : {0.5, 1.0})
        for (double v : {0.7, 2.0})
            CHECK(entropy(TruncExp{c, v}) == doctest::Approx(fn_h(c, v)).epsilon(1e-13));
    // discrete entropies vs direct -sum p log p
    for (const auto& d : {ScalarDist{TruncGeomSpaced{0.36, 0.5, 4}},
                          ScalarDist{DiscreteUniformSpaced{0.0, 1.0, 5}},
                          ScalarDist{FiniteDiscrete{{{0.0, 0.125}, {0.5, 0.5}, {0.75, 0.375}}}}}) {
        const auto atoms = finite_atoms(d);
        double acc = 0.0;
        for (const auto& [x, p] : *atoms) {
            (void)x;
            if (p > 0) acc -= p * std::log(p);
        }
        CHECK(entropy(d) == doctest::Approx(acc).epsilon(1e-12));
    }
    // atom+geometric is purely discrete: check against truncated summation
    const AtomPlusGeometric ag{0.25, 0.2};
    double acc = 0.0;
    double p0 = ag.atom_weight + (1.0 - ag.atom_weight) * ag.success;
    acc -= p0 * std::log(p0);
    double pk = (1.0 - ag.atom_weight) * ag.success * (1.0 - ag.success);
    for (int k = 1; k < 400; ++k) {
        acc -= pk * std::log(pk);
        pk *= 1.0 - ag.success;
    }
    CHECK(entropy(ScalarDist{ag}) == doctest::Approx(acc).epsilon(1e-10));

    CHECK_THROWS_AS(entropy(ScalarDist{AtomPlusExponential{0.5, 1.0}}), MixedDistribution);
    CHECK_THROWS_AS(entropy(ScalarDist{dyadic_series_unit(1.0)}), NotSupported);
}

TEST_CASE("entropy of the truncated geometric matches its mean-form expression") {
    // K+1 atoms at parameter zeta: H = log((1-(1-z)^{K+1})/z) - E[j] log(1-z)
    const double z = 0.23;
    const long K = 6;
    const TruncGeomSpaced d{z, 2.0, K + 1};
    const double qK1 = std::pow(1.0 - z, static_cast<double>(K + 1));
    const double Ej = (1.0 - z) / z - (K + 1) * qK1 / (1.0 - qK1);
    const double expected = std::log((1.0 - qK1) / z) - Ej * std::log(1.0 - z);
    CHECK(entropy(ScalarDist{d}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sampling: determinism, CLT band, degenerate atom") {
    const ScalarDist u = Uniform{0.0, 1.0};
    const auto s1 = sample(u, 42, 100000);
    const auto s2 = sample(u, 42, 100000);
    CHECK(s1 == s2);
    double m = 0.0;
    for (double x : s1) m += x;
    m /= static_cast<double>(s1.size());
    CHECK(std::abs(m - 0.5) <= 3.0 / std::sqrt(12.0 * 100000.0));

    const ScalarDist atom = FiniteDiscrete{{{0.75, 1.0}}};
    const auto s3 = sample(atom, 7, 3);
    CHECK(s3 == std::vector<double>{0.75, 0.75, 0.75});
}

TEST_CASE("sampling: fixed-seed KS against the analytic CDF") {
    const std::size_t n = 100000;
    std::uint64_t seed = 1234;
    for (const auto& d : closed_form_zoo()) {
        INFO(kind_name(d));
        const double ks = ks_statistic(sample(d, seed++, n), d);
        CHECK(ks < 0.006);  // 1% KS level is 1.628/sqrt(n) = 0.00515
    }
    CHECK(ks_statistic(sample(TruncExp{1.0, 1.0}, 99, n), TruncExp{1.0, 1.0}) < 0.006);
}

TEST_CASE("two-sided dyadic series is the exponential law: residual within tail_eps") {
    double previous = 1e9;
    for (long J : {10L, 20L, 40L}) {
        const BernoulliSeries s = dyadic_series_exp(1.0, J, 8);
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double t = -50.0 + 0.25 * i;
            worst = std::max(worst,
                             std::abs(cf_eval(ScalarDist{s}, t) - cf_eval(Exponential{1.0}, t)));
        }
        CHECK(worst <= s.tail_eps);
        CHECK(worst < previous);  // residual shrinks monotonically in J
        previous = worst;
    }
}

TEST_CASE("unit-interval dyadic series reproduces the truncated exponential") {
    for (double lambda : {0.5, 1.0, 3.0}) {
        const BernoulliSeries s = dyadic_series_unit(lambda);
        const ScalarDist target = TruncExp{1.0, lambda};
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double t = -50.0 + 0.25 * i;
            worst = std::max(worst, std::abs(cf_eval(ScalarDist{s}, t) - cf_eval(target, t)));
        }
        CHECK(worst <= 10.0 * s.tail_eps + 1e-12);
        CHECK(std::abs(mean(ScalarDist{s}) - fn_f(1.0, lambda)) <= 1e-12);
    }
}

TEST_CASE("validation rejects malformed parameters") {
    CHECK_THROWS_AS(validate(Uniform{1.0, 0.0}), DistError);
    CHECK_THROWS_AS(validate(Exponential{-1.0}), DistError);
    CHECK_THROWS_AS(validate(Geometric{1.0}), DistError);
    CHECK_THROWS_AS(validate(FiniteDiscrete{{{0.0, 0.5}, {1.0, 0.6}}}), DistError);
    CHECK_NOTHROW(validate(FiniteDiscrete{{{0.0, 0.5}, {1.0, 0.5}}}));
}

TEST_CASE("json round trip preserves the distribution") {
    for (const auto& d : closed_form_zoo()) {
        const ScalarDist back = dist_from_json(to_json(d));
        CHECK(kind_name(back) == kind_name(d));
        for (double t : {-3.0, 0.7, 11.0})
            CHECK(std::abs(cf_eval(back, t) - cf_eval(d, t)) <= 1e-15);
        CHECK(mean(back) == mean(d));
    }
    const ScalarDist s = dyadic_series_unit(1.0, 20);
    const ScalarDist back = dist_from_json(to_json(s));
    CHECK(std::get<BernoulliSeries>(back).tail_eps == std::get<BernoulliSeries>(s).tail_eps);
    CHECK(std::get<BernoulliSeries>(back).terms.size() ==
          std::get<BernoulliSeries>(s).terms.size());
    CHECK_THROWS_AS(dist_from_json(nlohmann::json{{"kind", "nope"}}), DistError);
}
