#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oimac/capacity.hpp"
#include "oimac/decomp.hpp"
#include "oimac/dist.hpp"
#include "oimac/numerics.hpp"

#include <cmath>
#include <random>

using namespace oimac;

namespace {

double rnd01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr double kLogTwoPiE = 2.8378770664093453;

}  // namespace

TEST_CASE("fn_f / fn_g / fn_h limits and ranges") {
    CHECK(fn_f(1.0, 0.0) == 0.5);
    CHECK(fn_f(1.0, 1e-12) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fn_g(0.8, 1.7, 1) == 0.0);
    CHECK(fn_h(1.0, 1e-10) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(fn_h(1.0, 0.0) == 0.0);
    for (double c : {0.3, 0.7, 1.0}) {
        double prev_f = c / 2.0, prev_h = std::log(c);
        for (double v : {0.01, 0.1, 1.0, 5.0, 30.0}) {
            const double f = fn_f(c, v);
            CHECK(f > 0.0);
            CHECK(f < c / 2.0);
            CHECK(f < prev_f);  // decreasing in v
            const double h = fn_h(c, v);
            CHECK(h < std::log(c));
            CHECK(h < prev_h);
            prev_f = f;
            prev_h = h;
        }
    }
    // increasing in c, and the spaced-factor mean increases with the count
    CHECK(fn_f(0.9, 1.0) > fn_f(0.6, 1.0));
    CHECK(fn_g(1.0, 1.0, 4) > fn_g(1.0, 1.0, 2));
    CHECK_THROWS_AS(fn_f(-1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(fn_g(1.0, 1.0, 0), DomainViolation);
}

TEST_CASE("fn_R: limits, monotonicity, frozen value") {
    CHECK(fn_R(1e-9) == 0.0);
    double prev = 0.0;
    for (double u = 0.01; u <= 10.0; u += 0.01) {
        const double r = fn_R(u);
        CHECK(r >= prev);
        prev = r;
    }
    // frozen independent high-precision evaluation
    CHECK(fn_R(1.0) == doctest::Approx(1.9058131483612047).epsilon(1e-13));
}

TEST_CASE("single-user peak bound") {
    CHECK(su_lb_peak(15, 1e-9) == doctest::Approx(std::log(16.0)).epsilon(1e-12));
    CHECK(su_lb_peak(15, 0.01) ==
          doctest::Approx(std::log(16.0) - fn_R(0.3)).epsilon(1e-13));
    CHECK_THROWS_AS(su_lb_peak(1, 0.1), DomainViolation);
}

TEST_CASE("single-user mean-constrained bound dominates random probes") {
    const long K = 31;
    const double alpha = 0.5, sigma = 0.05;
    const double value = su_lb_average(K, alpha, sigma);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double t = 1e-6 + (1.0 - 2e-6) * rnd01(rng);
        const ScalarDist tg = TruncGeomSpaced{t, 1.0, K + 1};
        const double mean_idx = mean(tg);
        const double probe = entropy(tg) - fn_R(2.0 * mean_idx * sigma / alpha);
        CHECK(value >= probe - 1e-9);
    }
    // single-atom limit of the entropy term
    CHECK(entropy(ScalarDist{TruncGeomSpaced{1.0 - 1e-12, 1.0, 8}}) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("geometric-input bound grows like -log sigma at high SNR") {
    const double alpha = 0.5;
    const double v3 = su_lb_average_geom(alpha, 1e-3);
    const double v5 = su_lb_average_geom(alpha, 1e-5);
    const double slope = (v5 - v3) / std::log(1e2);  // value per -log(sigma) decade pair
    CHECK(slope == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("peak+average single-user bound: uniform-ratio edge equals the peak bound") {
    for (double sigma : {0.1, 0.01}) {
        CHECK(su_lb_peak_average(8, 0.5, sigma) ==
              doctest::Approx(su_lb_peak(8, sigma)).epsilon(1e-12));
    }
    // sigma -> 0: approaches the maximum-entropy discrete value log(K+1)
    CHECK(su_lb_peak_average(8, 0.2, 1e-8) == doctest::Approx(std::log(9.0)).epsilon(1e-4));
}

TEST_CASE("mean-index root: two independent solvers agree") {
    const long K = 3;
    const double alpha = 0.2;
    const double target = alpha * static_cast<double>(K);
    auto m = [&](double t) { return mean(ScalarDist{TruncGeomSpaced{t, 1.0, K + 1}}); };
    RootSpec spec;
    spec.fn = [&](double t) { return m(t) - target; };
    spec.lo = 1e-9;
    spec.hi = 1.0 - 1e-9;
    const double via_bisect = bisect(spec);
    double lo = 1e-9, hi = 1.0 - 1e-9;  // secant within a shrinking bracket
    double x = 0.5;
    for (int i = 0; i < 200; ++i) {
        x = 0.5 * (lo + hi);
        (m(x) > target ? lo : hi) = x;
    }
    CHECK(std::abs(via_bisect - x) <= 1e-9);
}

TEST_CASE("channel normalization") {
    const ChannelConfig id =
        normalize_config(Family::Peak, {1.0, 1.0, 0.5, 0.5, 0.0, 0.0, 0.25});
    CHECK(id.A1 == doctest::Approx(0.5));
    CHECK(id.sigma == doctest::Approx(0.25));

    const ChannelConfig sw = normalize_config(Family::Peak, {2.0, 1.0, 1.0, 1.0, 0.0, 0.0, 3.0});
    CHECK(sw.A1 == doctest::Approx(1.0 / 3.0));  // users swapped so A1 <= A2
    CHECK(sw.A2 == doctest::Approx(2.0 / 3.0));
    CHECK(sw.sigma == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalize_config(Family::Peak, {0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0}),
                    NonPositiveParameter);
}

TEST_CASE("peak-family bounds") {
    const PeakBounds b1 = mac_peak_bounds(0.3, 1.0);
    CHECK(b1.lower_epi == doctest::Approx(0.028449943987881431).epsilon(1e-13));
    CHECK(b1.upper >= b1.lower_epi);

    // reciprocal peak collapses the floor/ceil factor onto the plain bound
    const PeakBounds b2 = mac_peak_bounds(0.25, 0.05);
    CHECK(b2.lower_floorceil == doctest::Approx(b2.lower_epi).epsilon(1e-13));

    // high-SNR sandwich
    const PeakBounds b3 = mac_peak_bounds(0.3, 1e-4);
    CHECK(std::abs(b3.upper - b3.lower_epi) <= 0.01);
    CHECK(std::abs(b3.upper + std::log(1e-4) + 0.5 * kLogTwoPiE) <= 0.01);

    const double direct = std::log(5.0 * 3.0) - fn_R(2.0 * 5.0 * 0.01 / 0.3);
    CHECK(mac_peak_lower_discrete(0.3, 0.01, 5) == doctest::Approx(direct).epsilon(1e-13));
    CHECK(b1.lower_discrete >= mac_peak_lower_discrete(0.3, 1.0, 2) - 1e-12);
}

TEST_CASE("average-family bounds") {
    const AverageBounds b = mac_average_bounds(0.44, 0.1);
    CHECK(b.lower_geometric <= b.upper);
    CHECK(b.lower_epi <= b.upper);
    CHECK(b.lower_truncgeom <= b.upper);

    const AverageBounds hs = mac_average_bounds(0.44, 1e-4);
    const double target = 0.5 * std::log(std::exp(1.0) / (2.0 * 3.14159265358979324));
    CHECK(std::abs(hs.upper + std::log(1e-4) - target) <= 0.01);
    CHECK(std::abs(hs.lower_epi + std::log(1e-4) - target) <= 0.01);

    // construction picks: user-1 mean is met exactly, the rest fits user 2
    const TruncGeomPick pick = mac_average_lower_truncgeom_pick(0.44, 0.1, 3);
    const ScalarDist x1 = TruncGeomSpaced{pick.t, 2.0 * pick.l, pick.K1};
    CHECK(mean(x1) == doctest::Approx(0.44).epsilon(1e-9));
    const ScalarDist sum =
        TruncGeomSpaced{-std::expm1(static_cast<double>(pick.K1) * std::log1p(-pick.t)),
                        2.0 * pick.l * static_cast<double>(pick.K1), pick.n};
    CHECK(mean(x1) + mean(sum) <= 1.0 + 1e-9);
}

TEST_CASE("pa upper bound: minimization, low-SNR edge, asymptote") {
    const PaUpper low = mac_pa_upper(0.4, 1.0);
    CHECK(low.value == doctest::Approx(std::log1p(1.0 / (4.132731354122493))).epsilon(1e-9));
    CHECK(low.eta == 0.0);  // the eta -> 0 closed form wins at low SNR

    const PaUpper hs = mac_pa_upper(0.4, 0.01);
    std::mt19937_64 rng(5);
    const double c = 1.0 / (4.132731354122493 * 0.01);
    const double noise = 0.01 / std::sqrt(2.0 * 3.14159265358979324);
    for (int i = 0; i < 1000; ++i) {
        const double eta = std::exp(std::log(1e-6) + std::log(1e12) * rnd01(rng));
        const double probe =
            std::log1p(c * -std::expm1(-eta) / eta) + eta * noise + eta * 0.4;
        CHECK(hs.value <= probe + 1e-9);
    }
    CHECK(hs.eta_prime == doctest::Approx(1.2299332003819575).epsilon(1e-9));
    CHECK(hs.asymptote == doctest::Approx(-0.060738685566729404).epsilon(1e-9));

    const PaUpper half = mac_pa_upper(0.5, 0.01);
    CHECK(half.eta_prime == 0.0);
    CHECK(half.asymptote == 0.0);
    // depends on the total ratio only, so symmetric in the users by design
    CHECK(mac_pa_upper(0.4, 0.02).value == mac_pa_upper(0.4, 0.02).value);
}

TEST_CASE("pa lower bound via the truncated-exponential construction") {
    const ChannelConfig fig5 = ChannelConfig::peak_average(0.3, 0.4, 0.4, 0.01);
    const PaLowerThm3 k4 = mac_pa_lower_thm3(fig5, 4);
    CHECK_FALSE(k4.epi_uniform_case);
    CHECK(k4.l == doctest::Approx(0.75));
    CHECK(fn_f(0.25, k4.eta_star) == doctest::Approx(0.12).epsilon(1e-9));  // binding mean
    CHECK(k4.value > k4.value_uncorrected);  // the stray length factor only weakens

    const PaLowerThm3 best = mac_pa_lower_thm3_best(fig5);
    for (long k = 4; k <= 64; ++k) CHECK(best.value >= mac_pa_lower_thm3(fig5, k).value);
    CHECK(best.value <= mac_pa_upper(0.4, 0.01).value);

    CHECK_THROWS_AS(mac_pa_lower_thm3(fig5, 2), InfeasibleConstraints);

    // slack constraints: uniform case, with the expected high-SNR behavior
    const ChannelConfig cozy = ChannelConfig::peak_average(0.5, 0.5, 0.5, 1e-4);
    const PaLowerThm3 uni = mac_pa_lower_thm3(cozy, 2);
    CHECK(uni.epi_uniform_case);
    CHECK(uni.value + std::log(1e-4) ==
          doctest::Approx(std::log(uni.l) - 0.5 * kLogTwoPiE).epsilon(1e-4));
}

TEST_CASE("pa reciprocal-peak bounds") {
    const ChannelConfig cfg = ChannelConfig::peak_average(0.25, 0.4, 0.4, 0.01);
    const PaLowerCor4 b = mac_pa_lower_cor4(cfg, 4, 5);
    const double l = 1.0 - 0.25 + 1.0 / 20.0;
    CHECK(std::abs(fn_g(l, b.eta_prime, 17) - 0.75 * 0.4) <= 1e-10);  // back-substitution
    CHECK(std::abs(fn_f(0.25, b.eta_star) - 0.1) <= 1e-10);
    const double upper = mac_pa_upper(0.4, 0.01).value;
    CHECK(b.bound1 <= upper);
    CHECK(b.bound2 <= upper);

    const ChannelConfig half = ChannelConfig::peak_average(0.25, 0.5, 0.5, 0.01);
    const PaLowerCor4 bh = mac_pa_lower_cor4(half, 4, 4);
    CHECK(bh.bound2 ==
          doctest::Approx(0.5 * std::log1p(1.0 / (17.079468445347134 * 1e-4))).epsilon(1e-12));

    CHECK_THROWS_AS(mac_pa_lower_cor4(ChannelConfig::peak_average(0.3, 0.4, 0.4, 0.01), 3, 5),
                    PeakNotReciprocal);
    CHECK_THROWS_AS(mac_pa_lower_cor4(cfg, 4, 2), InfeasibleConstraints);
}

TEST_CASE("pa gap certificate") {
    const ChannelConfig fig5 = ChannelConfig::peak_average(0.3, 0.4, 0.4, 0.01);
    CHECK(mac_pa_gap(fig5, 4) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    for (long k = 4; k <= 16; ++k) {
        double g;
        try {
            g = mac_pa_gap(fig5, k);
        } catch (const ConditionViolated&) {
            continue;
        }
        CHECK(g < std::log(2.0));
    }
    const ChannelConfig rec = ChannelConfig::peak_average(0.25, 0.4, 0.4, 0.01);
    CHECK(mac_pa_gap(rec, 4) == doctest::Approx(0.0));

    const ChannelConfig fig6 = ChannelConfig::peak_average(0.3, 0.1, 0.1, 0.01);
    CHECK_THROWS_AS(mac_pa_gap(fig6, 4), ConditionViolated);
    CHECK(mac_pa_gap(fig6, 16) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("pa discrete-input bound") {
    const ChannelConfig fig5 = ChannelConfig::peak_average(0.3, 0.4, 0.4, 0.1);
    CHECK_THROWS_AS(mac_pa_lower_discrete(fig5, 2), InfeasibleWindow);  // 2 atoms, ratio 0.4

    const double v = mac_pa_lower_discrete(fig5, 6);
    CHECK(v <= mac_pa_upper(0.4, 0.1).value);
    ChannelConfig noisy = fig5;
    noisy.sigma = 10.0;
    CHECK(mac_pa_lower_discrete(noisy, 6) <= 0.0);  // clamped later for curves

    const PaDiscreteBest best = mac_pa_lower_discrete_best(fig5);
    CHECK(best.value >= v - 1e-12);

    // the winning construction is admissible
    const TruncGeomPick pick = mac_pa_lower_discrete_pick(fig5, 6);
    const ScalarDist x1 = TruncGeomSpaced{pick.t, 2.0 * pick.l, pick.K1};
    CHECK(mean(x1) == doctest::Approx(fig5.E1).epsilon(1e-9));
    CHECK(2.0 * pick.l * static_cast<double>(pick.K1 - 1) <= fig5.A1 + 1e-12);
}

TEST_CASE("pa digit-split bound") {
    const PaLowerSpecial flat = mac_pa_lower_special(0.3, 1e-8, 0.05);
    CHECK(flat.alpha1 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(flat.alpha2 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(flat.bound ==
          doctest::Approx(0.5 * std::log1p(1.0 / (17.079468445347134 * 0.0025))).epsilon(1e-6));

    const PaLowerSpecial one = mac_pa_lower_special(0.5, 2.0, 0.05);
    CHECK(one.alpha1 == doctest::Approx((0.5 / (1.0 + std::exp(1.0))) / 0.5).epsilon(1e-12));

    // high-SNR: matches the upper bound's asymptote at the induced total ratio
    const double eta = 1.7;
    const PaLowerSpecial hs = mac_pa_lower_special(0.3, eta, 1e-6);
    const double aw = fn_f(1.0, eta);
    CHECK(0.3 * hs.alpha1 + 0.7 * hs.alpha2 == doctest::Approx(aw).epsilon(1e-12));
    CHECK(hs.bound + std::log(1e-6) ==
          doctest::Approx(fn_h(1.0, eta) - 0.5 * kLogTwoPiE).epsilon(1e-6));
}

TEST_CASE("pa general-ratio bound") {
    const ChannelConfig eq = ChannelConfig::peak_average(0.3, 0.4, 0.4, 0.05);
    const double direct =
        std::max(mac_pa_lower_thm3_best(eq).value, mac_pa_lower_discrete_best(eq).value);
    CHECK(mac_pa_lower_general(eq) == doctest::Approx(direct).epsilon(1e-9));

    const ChannelConfig fig7 = ChannelConfig::peak_average(0.3, 0.1, 0.4, 0.05);
    const double v33 = mac_pa_lower_general(fig7, 33);
    const double v9 = mac_pa_lower_general(fig7, 9);
    CHECK(v33 >= v9 - 1e-12);  // nested grids
    CHECK(v33 <= mac_pa_upper(fig7.alpha_w(), 0.05).value);

    const PaGeneralPick pick = mac_pa_lower_general_pick(fig7, 9);
    CHECK(pick.alpha_prime >= 0.1 - 1e-12);
    CHECK(pick.alpha_prime <= 0.4 + 1e-12);
}

TEST_CASE("high-SNR asymptote constants") {
    const Asymptotes a = asymptotes();
    CHECK(a.peak == doctest::Approx(-1.4189385332046727).epsilon(1e-14));
    CHECK(a.average == doctest::Approx(-0.41893853320467274).epsilon(1e-14));
    CHECK(asymptote_pa(0.5) == 0.0);
    CHECK(asymptote_pa(0.4) == doctest::Approx(-0.060738685566729404).epsilon(1e-9));
    CHECK(asymptote_pa(0.1) == doctest::Approx(-1.3026305974606598).epsilon(1e-8));
}

TEST_CASE("curves carry kinds, clamping, and sweep parameters") {
    const ChannelConfig cfg = ChannelConfig::peak_average(0.3, 0.4, 0.4, 1.0);
    const std::vector<double> snr = {0.0, 20.0, 40.0};
    const auto curves = compute_curves(cfg, bound_names(cfg.family, cfg), snr);
    REQUIRE(curves.size() == 3);
    for (const auto& c : curves) {
        for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
            CHECK(c.points[i + 1].value >= c.points[i].value);
        for (const auto& pt : c.points)
            if (c.kind == "lower") CHECK(pt.value >= 0.0);
    }
    const auto& discrete = curves[2];
    REQUIRE(discrete.name == "lower_discrete");
    CHECK(discrete.points[0].params.count("K1") == 1);
    CHECK(discrete.points[0].params.at("raw") <= discrete.points[0].value);

    CHECK(sigma_from_snr_db(40.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(sigma_from_snr_db(0.0) == 1.0);
}
