#pragma once

#include "oimac/capacity.hpp"
#include "oimac/decomp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

// Command-layer logic behind the executable: bound sweeps to CSV,
// decomposition construction/verification to JSON, and named check suites.
// Kept as a library so the outputs are testable byte-for-byte.

namespace oimac {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownBound : CliError {
    using CliError::CliError;
};
struct InvalidRange : CliError {
    using CliError::CliError;
};

struct SweepRequest {
    Family family = Family::Peak;
    double a1 = 0.3;
    double e1 = 0.44;
    double alpha1 = 0.4;
    double alpha2 = 0.4;
    double snr_lo_db = 0.0;
    double snr_hi_db = 40.0;
    int steps = 81;
    std::vector<std::string> bounds;  // empty = all defaults for the family
    bool bits = false;                // nats otherwise
    Exec exec = Exec::parallel;
};

ChannelConfig config_from_request(const SweepRequest& req);

// CSV with header snr_db,sigma,bound,kind,value; sigma = 10^{-snr_db/20};
// byte-identical across repeated runs of the same request.
std::string run_bounds_csv(const SweepRequest& req);

struct DecomposeRequest {
    std::string kind;
    double a = 0.5;
    long k = 3;
    long k1 = 1;
    long n = 3;
    double lambda = 1.0;
    double lambda1 = 0.5;
    bool monte_carlo = false;
    std::uint64_t seed = 20240817;
};

// Factor specs plus the verification report (schema documented in the repo).
nlohmann::json run_decompose_json(const DecomposeRequest& req);

struct CheckResult {
    bool pass = false;
    std::string text;
};

// name in {"appendix-c", "ordering", "asymptotes"}.
CheckResult run_check(const std::string& name, long n_max = 200);

// The five reference sweep configurations exercised by `check ordering`.
std::vector<ChannelConfig> reference_configs(double sigma = 1.0);

}  // namespace oimac
