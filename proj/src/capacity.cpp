#include "oimac/capacity.hpp"

#include "oimac/decomp.hpp"
#include "oimac/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace oimac {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925;
constexpr double kTwoPiE = 17.07946844534713413092;
constexpr double kSqrtTwoPiE = 4.132731354122493;

void require_positive(double x, const char* msg) {
    if (!(x > 0.0)) throw NonPositiveParameter(msg);
}

long floor_tol(double x) { return static_cast<long>(std::floor(x + 1e-9)); }
long ceil_tol(double x) { return static_cast<long>(std::ceil(x - 1e-9)); }

// Mean index of K atoms with pmf proportional to (1-t)^j, j in [0, K-1];
// decreases from (K-1)/2 at t -> 0 to 0 at t -> 1.
double mean_index(double t, long K) { return truncgeom_mean_index(t, K); }

double truncgeom_entropy_idx(double t, long K, double mean_idx) {
    const double lgq = std::log1p(-t);
    const double one_minus_qK = -std::expm1(static_cast<double>(K) * lgq);
    return std::log(one_minus_qK / t) - mean_idx * lgq;
}

// Root of mean_index(., K) = target on (0,1); 0 when the mean constraint is
// already slack at the uniform end.
double solve_mean_index(long K, double target) {
    const double eps = kOpenEndpointEps;
    if (mean_index(eps, K) <= target) return 0.0;
    RootSpec spec;
    spec.fn = [&](double t) { return mean_index(t, K) - target; };
    spec.lo = eps;
    spec.hi = 1.0 - eps;
    const double root = bisect(spec);
    if (std::abs(mean_index(root, K) - target) > 1e-9 * std::max(1.0, target))
        throw RootBracketFailure("mean-index root failed back-substitution");
    return root;
}

double solve_f_eq(double c, double target, const char* what) {
    const double eta = solve_decreasing([c](double v) { return fn_f(c, v); }, target, 1e-9, 1.0);
    if (eta > 0.0 && std::abs(fn_f(c, eta) - target) > 1e-9)
        throw RootBracketFailure(what);
    return eta;
}

double solve_g_eq(double c, long m, double target, const char* what) {
    const double eta =
        solve_decreasing([c, m](double v) { return fn_g(c, v, m); }, target, 1e-9, 1.0);
    if (eta > 0.0 && std::abs(fn_g(c, eta, m) - target) > 1e-9)
        throw RootBracketFailure(what);
    return eta;
}

// EPI-style rate of a truncated exponential sum on [0, len] with rate eta.
double epi_truncexp(double len, double eta, double sigma) {
    if (eta <= 0.0) return 0.5 * std::log1p(len * len / (kTwoPiE * sigma * sigma));
    const double alpha = fn_f(len, eta);
    const double shape = -std::expm1(-eta * len) / eta;
    return 0.5 * std::log1p(std::exp(2.0 * alpha * eta) * shape * shape / (kTwoPiE * sigma * sigma));
}

void require_equal_ratio(const ChannelConfig& cfg, const char* what) {
    if (cfg.family != Family::PeakAverage)
        throw InfeasibleConstraints(std::string(what) + ": peak+average family required");
    if (std::abs(cfg.alpha1() - cfg.alpha2()) > 1e-9)
        throw InfeasibleConstraints(std::string(what) + ": equal ratios required");
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Peak: return "peak";
        case Family::Average: return "average";
        default: return "pa";
    }
}

ChannelConfig ChannelConfig::peak(double A1, double sigma) {
    require_positive(A1, "peak: A1 > 0");
    require_positive(sigma, "peak: sigma > 0");
    if (A1 > 0.5 + 1e-12) throw DomainViolation("peak: convention A1 <= A2 needs A1 <= 1/2");
    ChannelConfig c;
    c.family = Family::Peak;
    c.A1 = A1;
    c.A2 = 1.0 - A1;
    c.E1 = c.A1 / 2.0;
    c.E2 = c.A2 / 2.0;
    c.sigma = sigma;
    return c;
}

ChannelConfig ChannelConfig::average(double E1, double sigma) {
    require_positive(E1, "average: E1 > 0");
    require_positive(sigma, "average: sigma > 0");
    if (E1 > 1.0) throw DomainViolation("average: E1 + E2 = 1 convention");
    ChannelConfig c;
    c.family = Family::Average;
    c.E1 = E1;
    c.E2 = 1.0 - E1;
    c.A1 = c.A2 = 0.0;  // unconstrained
    c.sigma = sigma;
    return c;
}

ChannelConfig ChannelConfig::peak_average(double A1, double a1, double a2, double sigma) {
    require_positive(A1, "peak_average: A1 > 0");
    require_positive(sigma, "peak_average: sigma > 0");
    if (A1 > 0.5 + 1e-12) throw DomainViolation("peak_average: A1 <= A2 convention");
    if (!(a1 > 0.0 && a1 <= 0.5 && a2 > 0.0 && a2 <= 0.5))
        throw DomainViolation("peak_average: ratios in (0, 1/2]");
    ChannelConfig c;
    c.family = Family::PeakAverage;
    c.A1 = A1;
    c.A2 = 1.0 - A1;
    c.E1 = A1 * a1;
    c.E2 = c.A2 * a2;
    c.sigma = sigma;
    return c;
}

ChannelConfig normalize_config(Family family, const RawConfig& raw) {
    require_positive(raw.h1, "normalize: h1 > 0");
    require_positive(raw.h2, "normalize: h2 > 0");
    require_positive(raw.sigma, "normalize: sigma > 0");
    double s;
    if (family == Family::Average) {
        require_positive(raw.E1, "normalize: E1 > 0");
        require_positive(raw.E2, "normalize: E2 > 0");
        s = raw.h1 * raw.E1 + raw.h2 * raw.E2;
        const double e1 = raw.h1 * raw.E1 / s;
        return ChannelConfig::average(std::min(e1, 1.0 - e1), raw.sigma / s);
    }
    require_positive(raw.A1, "normalize: A1 > 0");
    require_positive(raw.A2, "normalize: A2 > 0");
    s = raw.h1 * raw.A1 + raw.h2 * raw.A2;
    double p1 = raw.h1 * raw.A1 / s;
    double p2 = raw.h2 * raw.A2 / s;
    double e1 = raw.h1 * raw.E1 / s;
    double e2 = raw.h2 * raw.E2 / s;
    if (p1 > p2) {  // user 1 is the smaller-peak user
        std::swap(p1, p2);
        std::swap(e1, e2);
    }
    if (family == Family::Peak) return ChannelConfig::peak(p1, raw.sigma / s);
    return ChannelConfig::peak_average(p1, e1 / p1, e2 / p2, raw.sigma / s);
}

double fn_f(double c, double v) {
    if (!(c > 0.0)) throw DomainViolation("fn_f: c > 0");
    if (v < 0.0) throw DomainViolation("fn_f: v >= 0");
    if (v == 0.0) return c / 2.0;
    return truncexp_mean(c, v);
}

double fn_g(double c, double v, long m) {
    if (m < 1) throw DomainViolation("fn_g: m >= 1");
    return fn_f(c, v) - fn_f(c / static_cast<double>(m), v);
}

double fn_h(double c, double v) {
    if (!(c > 0.0)) throw DomainViolation("fn_h: c > 0");
    if (v < 0.0) throw DomainViolation("fn_h: v >= 0");
    if (v == 0.0) return std::log(c);
    return truncexp_entropy(c, v);
}

double fn_R(double u) {
    if (u <= 0.0) return 0.0;
    const double inv = 1.0 / u;
    if (inv > 40.0) return 0.0;  // Q underflows far below any tolerance
    return 2.0 * q_func(inv) *
           (2.0 + 0.5 * inv * inv + std::log(5.0 + 2.0 * u * u) +
            std::log1p(std::sqrt(4.5 * kPi) * u));
}

double su_lb_peak(long K, double sigma) {
    if (K < 2) throw DomainViolation("su_lb_peak: K >= 2");
    require_positive(sigma, "su_lb_peak: sigma > 0");
    return std::log(static_cast<double>(K + 1)) - fn_R(2.0 * static_cast<double>(K) * sigma);
}

namespace {

// Shared objective of the mean-constrained discrete-input bounds: entropy of
// the K-atom truncated geometric at parameter t minus the spacing penalty.
double su_average_objective(double t, long K, double alpha, double sigma) {
    const double mi = mean_index(t, K);
    return truncgeom_entropy_idx(t, K, mi) - fn_R(2.0 * mi * sigma / alpha);
}

double sup_over_t(long K, double alpha, double sigma, double t_hi) {
    MaximizeSpec spec;
    spec.fn = [&](double t) { return su_average_objective(t, K, alpha, sigma); };
    spec.lo = kOpenEndpointEps;
    spec.hi = t_hi;
    double best = maximize_1d(spec).value;
    // t -> 0 limit: uniform atoms.
    const double uniform_limit = std::log(static_cast<double>(K)) -
                                 fn_R(static_cast<double>(K - 1) * sigma / alpha);
    return std::max(best, uniform_limit);
}

}  // namespace

double su_lb_average(long K, double alpha, double sigma) {
    if (K < 1) throw DomainViolation("su_lb_average: K >= 1");
    require_positive(alpha, "su_lb_average: alpha > 0");
    require_positive(sigma, "su_lb_average: sigma > 0");
    return sup_over_t(K + 1, alpha, sigma, 1.0 - kOpenEndpointEps);
}

double su_lb_average_geom(double alpha, double sigma) {
    require_positive(alpha, "su_lb_average_geom: alpha > 0");
    require_positive(sigma, "su_lb_average_geom: sigma > 0");
    MaximizeSpec spec;
    spec.fn = [&](double l) {
        const double r = alpha / (2.0 * l);
        return std::log1p(r) + r * std::log1p(1.0 / r) - fn_R(sigma / l);
    };
    spec.lo = kUnboundedScanLo;
    spec.hi = kUnboundedScanHi;
    spec.log_grid = true;
    return maximize_1d(spec).value;
}

double su_lb_peak_average(long K, double alpha, double sigma) {
    if (K < 2) throw DomainViolation("su_lb_peak_average: K >= 2");
    if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainViolation("su_lb_peak_average: alpha in (0,1/2]");
    require_positive(sigma, "su_lb_peak_average: sigma > 0");
    // eta: mean constraint becomes tight at the half-spacing limit.
    const double eta = solve_mean_index(K + 1, alpha * static_cast<double>(K));
    if (eta <= 0.0) {
        // Constraint slack everywhere: the uniform limit value.
        return std::log(static_cast<double>(K + 1)) - fn_R(static_cast<double>(K) * sigma / alpha);
    }
    return sup_over_t(K + 1, alpha, sigma, eta);
}

double mac_peak_lower_discrete(double A1, double sigma, long n) {
    if (n < 2) throw DomainViolation("mac_peak_lower_discrete: n >= 2");
    const long fl = floor_tol(1.0 / A1);
    return std::log(static_cast<double>(n * fl)) - fn_R(2.0 * static_cast<double>(n) * sigma / A1);
}

PeakBounds mac_peak_bounds(double A1, double sigma) {
    if (!(A1 > 0.0 && A1 <= 0.5 + 1e-12)) throw DomainViolation("mac_peak_bounds: A1 in (0,1/2]");
    require_positive(sigma, "mac_peak_bounds: sigma > 0");
    PeakBounds b;
    b.upper = std::min(0.5 * std::log1p(0.25 / (sigma * sigma)),
                       std::log1p(1.0 / (kSqrtTwoPiE * sigma)));
    b.lower_epi = 0.5 * std::log1p(1.0 / (kTwoPiE * sigma * sigma));
    const double fl = static_cast<double>(floor_tol(1.0 / A1));
    const double ce = static_cast<double>(ceil_tol(1.0 / A1));
    const double ratio = fl / ce;
    b.lower_floorceil = 0.5 * std::log1p(ratio * ratio / (kTwoPiE * sigma * sigma));
    b.lower_discrete = -1e300;
    for (long n = 2; n <= 1024; ++n) {
        const double v = mac_peak_lower_discrete(A1, sigma, n);
        if (v > b.lower_discrete) {
            b.lower_discrete = v;
            b.best_n = n;
        }
    }
    return b;
}

namespace {

// Largest outer count n <= n_cap keeping the summed mean within budget.
long pick_outer_count(double t, long K1, double budget_over_2l, long n_cap) {
    long lo = 1, hi = std::max<long>(1, n_cap);
    while (lo < hi) {
        const long mid = (lo + hi + 1) / 2;
        if (mean_index(t, mid * K1) <= budget_over_2l)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

// Shared core of the two-user truncated-geometric constructions: user 1
// carries K1 atoms at parameter t with mean E1 (fixing the half-spacing l),
// user 2 stacks n spaced copies within `budget`; the R penalty sees only the
// inner spacing.
TruncGeomPick truncgeom_construction(double E1, double budget, double sigma, long K1, double t_hi,
                                     long n_cap) {
    auto n_at = [&](double t, double m1) {
        return pick_outer_count(t, K1, 0.5 * budget * 2.0 * m1 / E1, n_cap);
    };
    auto objective = [&](double t) {
        const double m1 = mean_index(t, K1);
        const long K = n_at(t, m1) * K1;
        return truncgeom_entropy_idx(t, K, mean_index(t, K)) - fn_R(2.0 * m1 * sigma / E1);
    };
    MaximizeSpec spec;
    spec.fn = objective;
    spec.lo = kOpenEndpointEps;
    spec.hi = t_hi;
    if (spec.lo >= spec.hi) throw InfeasibleWindow("truncgeom construction: empty range");
    const MaxResult r = maximize_1d(spec);
    TruncGeomPick pick;
    pick.value = r.value;
    pick.t = r.arg;
    pick.K1 = K1;
    const double m1 = mean_index(pick.t, K1);
    pick.l = E1 / (2.0 * m1);
    pick.n = n_at(pick.t, m1);
    return pick;
}

}  // namespace

TruncGeomPick mac_average_lower_truncgeom_pick(double E1, double sigma, long K1) {
    if (K1 < 2) throw DomainViolation("mac_average_lower_truncgeom: K1 >= 2");
    require_positive(E1, "mac_average_lower_truncgeom: E1 > 0");
    return truncgeom_construction(E1, 1.0, sigma, K1, 1.0 - kOpenEndpointEps, 1024 / K1);
}

double mac_average_lower_truncgeom(double E1, double sigma, long K1) {
    return mac_average_lower_truncgeom_pick(E1, sigma, K1).value;
}

GeomPick mac_average_lower_geom_pick(double E1, double sigma) {
    require_positive(E1, "mac_average_lower_geom_pick: E1 > 0");
    MaximizeSpec spec;
    spec.fn = [&](double l) {
        const double r = 0.5 / l;
        return std::log1p(r) + r * std::log1p(1.0 / r) - fn_R(sigma / l);
    };
    spec.lo = kUnboundedScanLo;
    spec.hi = kUnboundedScanHi;
    spec.log_grid = true;
    const MaxResult r = maximize_1d(spec);
    return {r.value, r.arg};
}

AverageBounds mac_average_bounds(double E1, double sigma) {
    if (!(E1 > 0.0 && E1 <= 0.5 + 1e-12)) throw DomainViolation("mac_average_bounds: E1 in (0,1/2]");
    require_positive(sigma, "mac_average_bounds: sigma > 0");
    AverageBounds b;
    const double inv = 1.0 / sigma + 2.0;
    b.upper = 0.5 * std::log(std::exp(1.0) / kTwoPi * inv * inv);
    b.lower_epi = 0.5 * std::log1p(std::exp(1.0) / (kTwoPi * sigma * sigma));
    b.lower_geometric = su_lb_average_geom(1.0, sigma);
    b.lower_truncgeom = -1e300;
    for (long K1 = 2; K1 <= 64; ++K1) {
        const double v = mac_average_lower_truncgeom(E1, sigma, K1);
        if (v > b.lower_truncgeom) {
            b.lower_truncgeom = v;
            b.best_K1 = K1;
        }
    }
    return b;
}

PaUpper mac_pa_upper(double alpha_w, double sigma) {
    require_positive(sigma, "mac_pa_upper: sigma > 0");
    if (!(alpha_w > 0.0 && alpha_w <= 1.0)) throw DomainViolation("mac_pa_upper: alpha_w in (0,1]");
    const double aw = std::min(alpha_w, 0.5);  // larger ratios act as 1/2
    const double c = 1.0 / (kSqrtTwoPiE * sigma);
    const double noise_term = sigma / std::sqrt(kTwoPi) * -std::expm1(-0.5 / (sigma * sigma));
    auto F = [&](double eta) {
        return std::log1p(c * -std::expm1(-eta) / eta) + eta * noise_term + eta * aw;
    };
    MaximizeSpec spec;
    spec.fn = [&](double eta) { return -F(eta); };
    spec.lo = kUnboundedScanLo;
    spec.hi = kUnboundedScanHi;
    spec.log_grid = true;
    const MaxResult r = maximize_1d(spec);
    PaUpper out;
    out.value = -r.value;
    out.eta = r.arg;
    const double limit0 = std::log1p(c);  // eta -> 0 closed form
    if (limit0 < out.value) {
        out.value = limit0;
        out.eta = 0.0;
    }
    out.eta_prime = aw >= 0.5 ? 0.0 : solve_f_eq(1.0, aw, "mac_pa_upper: eta'");
    out.asymptote = fn_h(1.0, out.eta_prime);
    return out;
}

PaLowerThm3 mac_pa_lower_thm3(const ChannelConfig& cfg, long k) {
    require_equal_ratio(cfg, "mac_pa_lower_thm3");
    const long k_min = ceil_tol(1.0 / cfg.A1);
    if (k < k_min) throw InfeasibleConstraints("mac_pa_lower_thm3: k >= ceil(1/A1)");
    PaLowerThm3 out;
    out.k = k;
    const double kk = static_cast<double>(k);
    const double l = 1.0 / kk + 1.0 - static_cast<double>(ceil_tol(cfg.A1 * kk)) / kk;
    const long m = std::lround(kk * l);  // integer by construction
    out.l = l;

    double eta1 = 0.0, eta2 = 0.0;
    if (0.5 / kk > cfg.E1) eta1 = solve_f_eq(1.0 / kk, cfg.E1, "thm3: eta1");
    if (0.5 * (l - 1.0 / kk) > cfg.E2) eta2 = solve_g_eq(l, m, cfg.E2, "thm3: eta2");
    const double eta = std::max(eta1, eta2);
    if (eta <= 0.0) {
        out.epi_uniform_case = true;
        out.value = out.value_uncorrected = epi_truncexp(l, 0.0, cfg.sigma);
        return out;
    }
    out.eta_star = eta;
    out.alpha_star = fn_f(l, eta);
    out.value = epi_truncexp(l, eta, cfg.sigma);
    const double shape = -std::expm1(-eta * l) / eta;
    out.value_uncorrected =
        0.5 * std::log1p(std::exp(2.0 * out.alpha_star * eta * l) * shape * shape /
                         (kTwoPiE * cfg.sigma * cfg.sigma));
    return out;
}

PaLowerThm3 mac_pa_lower_thm3_best(const ChannelConfig& cfg, long k_max) {
    const long k_min = ceil_tol(1.0 / cfg.A1);
    PaLowerThm3 best;
    best.value = -1e300;
    for (long k = k_min; k <= std::max(k_min, k_max); ++k) {
        const PaLowerThm3 cur = mac_pa_lower_thm3(cfg, k);
        if (cur.value > best.value) best = cur;
    }
    return best;
}

PaLowerCor4 mac_pa_lower_cor4(const ChannelConfig& cfg, long k, long n) {
    require_equal_ratio(cfg, "mac_pa_lower_cor4");
    if (k < 2) throw InfeasibleConstraints("mac_pa_lower_cor4: k >= 2");
    const double kk = static_cast<double>(k);
    if (std::abs(cfg.A1 - 1.0 / kk) > 1e-12)
        throw PeakNotReciprocal("mac_pa_lower_cor4: A1 must equal 1/k");
    const double aw = cfg.alpha_w();
    if (n < ceil_tol(2.0 / aw)) throw InfeasibleConstraints("mac_pa_lower_cor4: n >= ceil(2/alpha_w)");

    PaLowerCor4 out;
    const double nn = static_cast<double>(n);
    const double l = 1.0 - 1.0 / kk + 1.0 / (nn * kk);
    const long m1 = std::lround(nn * kk * l);  // nk - n + 1
    const double rhs1 = (1.0 - 1.0 / kk) * aw;
    if (rhs1 >= 0.5 * (1.0 - 1.0 / kk)) {  // alpha_w = 1/2: uniform limit
        out.bound1 = epi_truncexp(l, 0.0, cfg.sigma);
    } else {
        out.eta_prime = solve_g_eq(l, m1, rhs1, "cor4: eta'");
        const double ep = out.eta_prime;
        const double alpha_p = fn_f(1.0, ep * l);
        const double shape = -std::expm1(-ep * l) / ep;
        out.bound1 = 0.5 * std::log1p(std::exp(2.0 * alpha_p * ep * l) * shape * shape /
                                      (kTwoPiE * cfg.sigma * cfg.sigma));
    }
    const double rhs2 = aw / kk;
    if (rhs2 >= 0.5 / kk) {
        out.bound2 = epi_truncexp(1.0, 0.0, cfg.sigma);
    } else {
        out.eta_star = solve_f_eq(1.0 / kk, rhs2, "cor4: eta*");
        out.bound2 = epi_truncexp(1.0, out.eta_star, cfg.sigma);
    }
    return out;
}

double mac_pa_gap(const ChannelConfig& cfg, long k) {
    require_equal_ratio(cfg, "mac_pa_gap");
    const long k_min = ceil_tol(1.0 / cfg.A1);
    if (k < k_min) throw InfeasibleConstraints("mac_pa_gap: k >= ceil(1/A1)");
    const double kk = static_cast<double>(k);
    const double l = 1.0 / kk + 1.0 - static_cast<double>(ceil_tol(cfg.A1 * kk)) / kk;
    const double aw = cfg.alpha_w();
    const double eta_prime = aw >= 0.5 ? 0.0 : solve_f_eq(1.0, aw, "mac_pa_gap: eta'");
    if (fn_f(1.0 / kk, eta_prime / l) > cfg.E1 + 1e-12)
        throw ConditionViolated("mac_pa_gap: admissibility condition fails for this k");
    return -std::log(l);
}

TruncGeomPick mac_pa_lower_discrete_pick(const ChannelConfig& cfg, long K1) {
    require_equal_ratio(cfg, "mac_pa_lower_discrete");
    if (K1 < 2) throw DomainViolation("mac_pa_lower_discrete: K1 >= 2");
    const double alpha = cfg.alpha_w();
    // Spacing window nonempty only when the K1-atom truncated geometric can
    // meet the mean constraint below the peak budget.
    if (alpha * static_cast<double>(K1) >= 0.5 * static_cast<double>(K1 - 1))
        throw InfeasibleWindow("mac_pa_lower_discrete: alpha too large for this K1");
    const double eta_star = solve_mean_index(K1, alpha * static_cast<double>(K1));
    if (eta_star <= 0.0)
        throw InfeasibleWindow("mac_pa_lower_discrete: no interior feasibility root");
    const long n_cap = std::max<long>(1, std::min<long>(floor_tol(1.0 / cfg.A1), 1024 / K1));
    return truncgeom_construction(cfg.E1, alpha, cfg.sigma, K1, eta_star - kOpenEndpointEps,
                                  n_cap);
}

double mac_pa_lower_discrete(const ChannelConfig& cfg, long K1) {
    return mac_pa_lower_discrete_pick(cfg, K1).value;
}

PaDiscreteBest mac_pa_lower_discrete_best(const ChannelConfig& cfg, long K1_max) {
    PaDiscreteBest best;
    best.value = -1e300;
    bool any = false;
    for (long K1 = 2; K1 <= K1_max; ++K1) {
        try {
            const double v = mac_pa_lower_discrete(cfg, K1);
            if (v > best.value) {
                best.value = v;
                best.best_K1 = K1;
            }
            any = true;
        } catch (const InfeasibleWindow&) {
            continue;
        }
    }
    if (!any) throw InfeasibleWindow("mac_pa_lower_discrete_best: no feasible K1");
    return best;
}

PaLowerSpecial mac_pa_lower_special(double A1, double eta_prime, double sigma) {
    if (!(A1 > 0.0 && A1 <= 0.5)) throw DomainViolation("mac_pa_lower_special: A1 in (0,1/2]");
    require_positive(eta_prime, "mac_pa_lower_special: eta' > 0");
    require_positive(sigma, "mac_pa_lower_special: sigma > 0");
    double s1 = 0.0;
    for (long j : binary_digit_indices(A1)) {
        const double v = std::ldexp(1.0, static_cast<int>(-j));
        s1 += v / (1.0 + std::exp(eta_prime * v));
    }
    const double total = fn_f(1.0, eta_prime);
    PaLowerSpecial out;
    out.alpha1 = s1 / A1;
    out.alpha2 = (total - s1) / (1.0 - A1);
    const double shape = -std::expm1(-eta_prime) / eta_prime;
    out.bound = 0.5 * std::log1p(std::exp(2.0 * total * eta_prime) * shape * shape /
                                 (kTwoPiE * sigma * sigma));
    return out;
}

PaGeneralPick mac_pa_lower_general_pick(const ChannelConfig& cfg, int grid_points) {
    if (cfg.family != Family::PeakAverage)
        throw InfeasibleConstraints("mac_pa_lower_general: peak+average family required");
    const double a_lo = cfg.alpha1();
    const double a_hi = std::min(cfg.alpha2(), 0.5);
    if (a_lo > a_hi + 1e-15) throw InfeasibleConstraints("mac_pa_lower_general: alpha1 <= alpha2");
    PaGeneralPick best;
    best.value = -1e300;
    const int n = std::max(grid_points, 2);
    static const long kK1Sweep[] = {2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
    for (int i = 0; i < n; ++i) {
        const double ap = a_lo + (a_hi - a_lo) * i / (n - 1);
        // Surrogate channel: user 1 contracted to peak E1/alpha', both users
        // at ratio alpha'; any admissible surrogate pair is admissible here.
        const double p1 = cfg.E1 / ap;
        const double p2 = cfg.A2;
        const double s = p1 + p2;
        const ChannelConfig sub =
            ChannelConfig::peak_average(std::min(p1, p2) / s, ap, ap, cfg.sigma / s);
        const PaLowerThm3 t3 = mac_pa_lower_thm3_best(sub);
        if (t3.value > best.value) {
            best.value = t3.value;
            best.alpha_prime = ap;
            best.scale = s;
            best.surrogate = sub;
            best.used_discrete = false;
            best.thm3 = t3;
            best.discrete.reset();
        }
        for (long K1 : kK1Sweep) {
            try {
                const TruncGeomPick pick = mac_pa_lower_discrete_pick(sub, K1);
                if (pick.value > best.value) {
                    best.value = pick.value;
                    best.alpha_prime = ap;
                    best.scale = s;
                    best.surrogate = sub;
                    best.used_discrete = true;
                    best.discrete = pick;
                }
            } catch (const InfeasibleWindow&) {
            }
        }
    }
    return best;
}

double mac_pa_lower_general(const ChannelConfig& cfg, int grid_points) {
    return mac_pa_lower_general_pick(cfg, grid_points).value;
}

Asymptotes asymptotes() {
    return {-0.5 * std::log(kTwoPiE), 0.5 * std::log(std::exp(1.0) / kTwoPi)};
}

double asymptote_pa(double alpha_w) {
    if (!(alpha_w > 0.0)) throw DomainViolation("asymptote_pa: alpha_w > 0");
    if (alpha_w >= 0.5) return 0.0;
    return fn_h(1.0, solve_f_eq(1.0, alpha_w, "asymptote_pa: eta'"));
}

double sigma_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

std::vector<std::string> bound_names(Family family, const ChannelConfig& cfg) {
    switch (family) {
        case Family::Peak:
            return {"upper", "lower_epi", "lower_floorceil", "lower_discrete"};
        case Family::Average:
            return {"upper", "lower_epi", "lower_geometric", "lower_truncgeom"};
        default: {
            if (std::abs(cfg.alpha1() - cfg.alpha2()) > 1e-9) return {"upper", "lower_general"};
            std::vector<std::string> names{"upper", "lower_thm3", "lower_discrete"};
            for (long k = 2; k <= 64; ++k)
                if (std::abs(cfg.A1 - 1.0 / static_cast<double>(k)) <= 1e-12) {
                    names.push_back("lower_cor4_spaced");
                    names.push_back("lower_cor4_contracted");
                    break;
                }
            return names;
        }
    }
}

namespace {

double clamp_lower(double v) { return std::max(v, 0.0); }

CurvePoint eval_bound_point(const ChannelConfig& base, const std::string& bound, double snr_db) {
    CurvePoint pt;
    pt.snr_db = snr_db;
    pt.sigma = sigma_from_snr_db(snr_db);
    ChannelConfig cfg = base;
    cfg.sigma = pt.sigma;
    const Family fam = cfg.family;
    if (fam == Family::Peak) {
        const PeakBounds b = mac_peak_bounds(cfg.A1, cfg.sigma);
        if (bound == "upper") {
            pt.value = b.upper;
        } else if (bound == "lower_epi") {
            pt.params["raw"] = b.lower_epi;
            pt.value = clamp_lower(b.lower_epi);
        } else if (bound == "lower_floorceil") {
            pt.params["raw"] = b.lower_floorceil;
            pt.value = clamp_lower(b.lower_floorceil);
        } else if (bound == "lower_discrete") {
            pt.params["raw"] = b.lower_discrete;
            pt.params["n"] = static_cast<double>(b.best_n);
            pt.value = clamp_lower(b.lower_discrete);
        } else {
            throw CapacityError("unknown peak bound: " + bound);
        }
        return pt;
    }
    if (fam == Family::Average) {
        if (bound == "upper") {
            const double inv = 1.0 / cfg.sigma + 2.0;
            pt.value = 0.5 * std::log(std::exp(1.0) / kTwoPi * inv * inv);
        } else if (bound == "lower_epi") {
            const double raw = 0.5 * std::log1p(std::exp(1.0) / (kTwoPi * cfg.sigma * cfg.sigma));
            pt.params["raw"] = raw;
            pt.value = clamp_lower(raw);
        } else if (bound == "lower_geometric") {
            const double raw = su_lb_average_geom(1.0, cfg.sigma);
            pt.params["raw"] = raw;
            pt.value = clamp_lower(raw);
        } else if (bound == "lower_truncgeom") {
            TruncGeomPick best;
            best.value = -1e300;
            for (long K1 = 2; K1 <= 64; ++K1) {
                const TruncGeomPick p = mac_average_lower_truncgeom_pick(cfg.E1, cfg.sigma, K1);
                if (p.value > best.value) best = p;
            }
            pt.params["raw"] = best.value;
            pt.params["K1"] = static_cast<double>(best.K1);
            pt.params["t"] = best.t;
            pt.params["l"] = best.l;
            pt.params["n"] = static_cast<double>(best.n);
            pt.value = clamp_lower(best.value);
        } else {
            throw CapacityError("unknown average bound: " + bound);
        }
        return pt;
    }
    if (bound == "upper") {
        const PaUpper u = mac_pa_upper(cfg.alpha_w(), cfg.sigma);
        pt.params["eta"] = u.eta;
        pt.value = u.value;
    } else if (bound == "lower_thm3") {
        const PaLowerThm3 b = mac_pa_lower_thm3_best(cfg);
        pt.params["raw"] = b.value;
        pt.params["k"] = static_cast<double>(b.k);
        pt.params["as_printed"] = b.value_uncorrected;
        pt.value = clamp_lower(b.value);
    } else if (bound == "lower_discrete") {
        TruncGeomPick best;
        best.value = -1e300;
        bool any = false;
        for (long K1 = 2; K1 <= 64; ++K1) {
            try {
                const TruncGeomPick p = mac_pa_lower_discrete_pick(cfg, K1);
                if (p.value > best.value) best = p;
                any = true;
            } catch (const InfeasibleWindow&) {
            }
        }
        if (!any) throw InfeasibleWindow("lower_discrete: no feasible K1");
        pt.params["raw"] = best.value;
        pt.params["K1"] = static_cast<double>(best.K1);
        pt.params["t"] = best.t;
        pt.params["l"] = best.l;
        pt.params["n"] = static_cast<double>(best.n);
        pt.value = clamp_lower(best.value);
    } else if (bound == "lower_cor4_spaced" || bound == "lower_cor4_contracted") {
        const long k = std::lround(1.0 / cfg.A1);
        const long n0 = ceil_tol(2.0 / cfg.alpha_w());
        if (bound == "lower_cor4_contracted") {
            const double raw = mac_pa_lower_cor4(cfg, k, n0).bound2;
            pt.params["raw"] = raw;
            pt.value = clamp_lower(raw);
        } else {
            double best = -1e300;
            long best_n = n0;
            for (long n = n0; n <= n0 + 32; ++n) {
                const double v = mac_pa_lower_cor4(cfg, k, n).bound1;
                if (v > best) {
                    best = v;
                    best_n = n;
                }
            }
            pt.params["raw"] = best;
            pt.params["n"] = static_cast<double>(best_n);
            pt.value = clamp_lower(best);
        }
    } else if (bound == "lower_general") {
        const PaGeneralPick pick = mac_pa_lower_general_pick(cfg);
        pt.params["raw"] = pick.value;
        pt.params["alpha_prime"] = pick.alpha_prime;
        pt.params["used_discrete"] = pick.used_discrete ? 1.0 : 0.0;
        pt.value = clamp_lower(pick.value);
    } else {
        throw CapacityError("unknown pa bound: " + bound);
    }
    return pt;
}

}  // namespace

BoundCurve compute_curve(const ChannelConfig& cfg, const std::string& bound,
                         const std::vector<double>& snr_db, Exec exec) {
    BoundCurve curve;
    curve.name = bound;
    curve.kind = bound == "upper" ? "upper" : "lower";
    curve.family = cfg.family;
    curve.points.resize(snr_db.size());
    // Exceptions must not escape a parallel region; collect and rethrow.
    std::vector<std::string> errors(snr_db.size());
    grid_apply(snr_db.size(), exec, [&](std::size_t i) {
        try {
            curve.points[i] = eval_bound_point(cfg, bound, snr_db[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw CapacityError("compute_curve(" + bound + "): " + e);
    return curve;
}

std::vector<BoundCurve> compute_curves(const ChannelConfig& cfg,
                                       const std::vector<std::string>& bounds,
                                       const std::vector<double>& snr_db, Exec exec) {
    std::vector<BoundCurve> out;
    out.reserve(bounds.size());
    for (const auto& b : bounds) out.push_back(compute_curve(cfg, b, snr_db, exec));
    return out;
}

}  // namespace oimac
