#pragma once

#include "oimac/dist.hpp"
#include "oimac/grid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

// Sum-capacity bounds of the two-user optical-intensity MAC (peak, average,
// and peak+average constraint families), the auxiliary single-user
// discrete-input lower bounds, and the high-SNR asymptotes. All rates in
// nats; unit conversion happens at the CLI boundary.

namespace oimac {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositiveParameter : CapacityError {
    using CapacityError::CapacityError;
};
struct DomainViolation : CapacityError {
    using CapacityError::CapacityError;
};
struct RootBracketFailure : CapacityError {
    using CapacityError::CapacityError;
};
struct InfeasibleConstraints : CapacityError {
    using CapacityError::CapacityError;
};
struct PeakNotReciprocal : CapacityError {
    using CapacityError::CapacityError;
};
struct InfeasibleWindow : CapacityError {
    using CapacityError::CapacityError;
};

enum class Family { Peak, Average, PeakAverage };

std::string family_name(Family f);

// Normalized two-user channel: peaks sum to 1 (peak families), averages sum
// to 1 (average family), user 1 is the smaller-peak user by convention.
struct ChannelConfig {
    Family family = Family::Peak;
    double A1 = 0.5, A2 = 0.5;  // peak intensities
    double E1 = 0.0, E2 = 0.0;  // average intensities
    double sigma = 1.0;

    double alpha1() const { return E1 / A1; }
    double alpha2() const { return E2 / A2; }
    double alpha_w() const { return E1 + E2; }

    static ChannelConfig peak(double A1, double sigma);
    static ChannelConfig average(double E1, double sigma);
    static ChannelConfig peak_average(double A1, double a1, double a2, double sigma);
};

struct RawConfig {
    double h1 = 1.0, h2 = 1.0;
    double A1 = 0.0, A2 = 0.0;
    double E1 = 0.0, E2 = 0.0;
    double sigma = 1.0;
};

// Gain/constraint normalization: peaks scale by h_j A_j / (h1 A1 + h2 A2)
// (averages likewise), sigma by the same factor; users swapped so A1 <= A2.
ChannelConfig normalize_config(Family family, const RawConfig& raw);

// Mean of the truncated exponential on [0,c] with rate v; range (0, c/2).
double fn_f(double c, double v);
// fn_f(c,v) - fn_f(c/m,v): mean of the spaced truncated-geometric factor.
double fn_g(double c, double v, long m);
// Differential entropy of the truncated exponential on [0,c], range
// (-inf, log c).
double fn_h(double c, double v);

// Closed-form bound on the conditional entropy of an equi-spaced discrete
// input given its noisy observation, u = sigma / half-spacing.
double fn_R(double u);

// Single-user discrete-input lower bounds (capacity in nats; may be
// negative at low SNR, callers clamp for display).
double su_lb_peak(long K, double sigma);
double su_lb_average(long K, double alpha, double sigma);
double su_lb_average_geom(double alpha, double sigma);  // K = infinity
double su_lb_peak_average(long K, double alpha, double sigma);

struct PeakBounds {
    double upper = 0.0;
    double lower_epi = 0.0;
    double lower_floorceil = 0.0;
    double lower_discrete = 0.0;  // best over the n sweep
    long best_n = 2;
};
PeakBounds mac_peak_bounds(double A1, double sigma);
double mac_peak_lower_discrete(double A1, double sigma, long n);

struct AverageBounds {
    double upper = 0.0;
    double lower_epi = 0.0;
    double lower_geometric = 0.0;
    double lower_truncgeom = 0.0;  // best over the K1 sweep
    long best_K1 = 2;
};
AverageBounds mac_average_bounds(double E1, double sigma);
double mac_average_lower_truncgeom(double E1, double sigma, long K1);

// Winning free parameters of the mean-constrained discrete constructions;
// used to rebuild the input pair for admissibility audits.
struct TruncGeomPick {
    double value = 0.0;
    double t = 0.0;  // truncated-geometric parameter of user 1
    double l = 0.0;  // half-spacing
    long n = 1;      // outer factor count
    long K1 = 2;
};
TruncGeomPick mac_average_lower_truncgeom_pick(double E1, double sigma, long K1);

// Argmax of the geometric-input bound (half-spacing l) alongside its value.
struct GeomPick {
    double value = 0.0;
    double l = 0.0;
};
GeomPick mac_average_lower_geom_pick(double E1, double sigma);

struct PaUpper {
    double value = 0.0;      // minimized over the free parameter eta > 0
    double eta = 0.0;        // minimizer (0 means the eta->0 closed form)
    double asymptote = 0.0;  // limit of value + log(sqrt(2 pi e) sigma)
    double eta_prime = 0.0;  // root of fn_f(1, .) = alpha_w
};
PaUpper mac_pa_upper(double alpha_w, double sigma);

struct PaLowerThm3 {
    double value = 0.0;
    double value_uncorrected = 0.0;  // exponent written with the extra l factor
    bool epi_uniform_case = false;
    double l = 0.0;
    double eta_star = 0.0;   // 0 in the uniform case
    double alpha_star = 0.0;
    long k = 0;
};
// Requires alpha1 == alpha2 and k >= ceil(1/A1). The returned value uses the
// entropy-power form exp(2 h(X1+X2)) of the constructed truncated-exponential
// sum; value_uncorrected keeps the weaker exponent with the stray length
// factor for audit.
PaLowerThm3 mac_pa_lower_thm3(const ChannelConfig& cfg, long k);
PaLowerThm3 mac_pa_lower_thm3_best(const ChannelConfig& cfg, long k_max = 64);

struct PaLowerCor4 {
    double bound1 = 0.0;  // spaced construction, free n
    double bound2 = 0.0;  // contracted construction
    double eta_prime = 0.0;
    double eta_star = 0.0;
};
// Requires A1 == 1/k exactly and n >= ceil(2/alpha_w).
PaLowerCor4 mac_pa_lower_cor4(const ChannelConfig& cfg, long k, long n);

// Certified high-SNR gap bound -log l for admissible k; the side condition
// fn_f(1/k, eta'/l) <= E1 is checked and ConditionViolated thrown otherwise.
double mac_pa_gap(const ChannelConfig& cfg, long k);

// Discrete-input lower bound with K1 inner atoms; sup over the truncated
// geometric parameter below its feasibility root.
double mac_pa_lower_discrete(const ChannelConfig& cfg, long K1);
TruncGeomPick mac_pa_lower_discrete_pick(const ChannelConfig& cfg, long K1);
struct PaDiscreteBest {
    double value = 0.0;
    long best_K1 = 2;
};
PaDiscreteBest mac_pa_lower_discrete_best(const ChannelConfig& cfg, long K1_max = 64);

struct PaLowerSpecial {
    double alpha1 = 0.0;  // induced, not prescribed
    double alpha2 = 0.0;
    double bound = 0.0;
};
// Binary-digit split of the truncated exponential: the construction fixes
// the per-user average-to-peak ratios as outputs.
PaLowerSpecial mac_pa_lower_special(double A1, double eta_prime, double sigma);

// General alpha1 < alpha2 case: surrogate equal-ratio channel with peak
// E1/alpha', evaluated over a grid of alpha' in [alpha1, min(alpha2, 1/2)].
double mac_pa_lower_general(const ChannelConfig& cfg, int grid_points = 33);

struct PaGeneralPick {
    double value = 0.0;
    double alpha_prime = 0.0;
    double scale = 1.0;  // surrogate peak sum; surrogate rates live at sigma/scale
    ChannelConfig surrogate;
    bool used_discrete = false;  // winning inner bound
    PaLowerThm3 thm3;
    std::optional<TruncGeomPick> discrete;
};
PaGeneralPick mac_pa_lower_general_pick(const ChannelConfig& cfg, int grid_points = 33);

struct Asymptotes {
    double peak = 0.0;     // lim C + log sigma
    double average = 0.0;  // lim C + log sigma
};
Asymptotes asymptotes();
// Peak+average: lim of C + log(sqrt(2 pi e) sigma) = fn_h(1, eta') with
// fn_f(1, eta') = alpha_w; equals 0 in the uniform limit alpha_w >= 1/2.
double asymptote_pa(double alpha_w);

struct CurvePoint {
    double snr_db = 0.0;
    double sigma = 0.0;
    double value = 0.0;  // clamped at 0 for lower bounds
    std::map<std::string, double> params;
};

struct BoundCurve {
    std::string name;
    std::string kind;  // "upper" | "lower"
    Family family = Family::Peak;
    std::vector<CurvePoint> points;  // sigma descending (SNR ascending)
};

// Names accepted per family (also the default curve set, in order).
std::vector<std::string> bound_names(Family family, const ChannelConfig& cfg);

// Evaluates one named bound at every sigma; points computed independently
// (parallel when requested), deterministic regardless of schedule.
BoundCurve compute_curve(const ChannelConfig& cfg, const std::string& bound,
                         const std::vector<double>& snr_db, Exec exec = Exec::parallel);

std::vector<BoundCurve> compute_curves(const ChannelConfig& cfg,
                                       const std::vector<std::string>& bounds,
                                       const std::vector<double>& snr_db,
                                       Exec exec = Exec::parallel);

// SNR axis convention: snr_db = 20 log10(1/sigma).
double sigma_from_snr_db(double snr_db);

}  // namespace oimac
