#include "oimac/cli.hpp"
#include "oimac/dist_json.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw oimac::CliError("cannot open output file: " + path);
    out << content;
}

oimac::Family parse_family(const std::string& s) {
    if (s == "peak") return oimac::Family::Peak;
    if (s == "average") return oimac::Family::Average;
    if (s == "pa" || s == "peak-average") return oimac::Family::PeakAverage;
    throw oimac::CliError("unknown family: " + s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-capacity bounds and maxentropic-distribution decompositions "
                 "for the two-user optical-intensity MAC"};
    app.require_subcommand(1);

    // ---- bounds ----
    auto* bounds = app.add_subcommand("bounds", "Sweep bound curves over SNR, emit CSV");
    std::string family = "peak", units = "nats", out_path, config_path, bounds_list;
    double a1 = 0.3, e1 = 0.44, alpha1 = 0.4, alpha2 = 0.4, snr_lo = 0.0, snr_hi = 40.0;
    int steps = 81;
    std::uint64_t seed = 20240817;
    auto* o_family = bounds->add_option("--family", family, "peak | average | pa");
    auto* o_a1 = bounds->add_option("--a1", a1, "peak of user 1 (peak families)");
    auto* o_e1 = bounds->add_option("--e1", e1, "average of user 1 (average family)");
    auto* o_al1 = bounds->add_option("--alpha1", alpha1, "E1/A1 (pa family)");
    auto* o_al2 = bounds->add_option("--alpha2", alpha2, "E2/A2 (pa family)");
    auto* o_lo = bounds->add_option("--snr-lo", snr_lo, "sweep start, dB (20 log10(1/sigma))");
    auto* o_hi = bounds->add_option("--snr-hi", snr_hi, "sweep end, dB");
    auto* o_steps = bounds->add_option("--snr-steps", steps, "grid points");
    auto* o_bounds = bounds->add_option("--bounds", bounds_list, "comma-separated bound names");
    auto* o_units = bounds->add_option("--units", units, "nats | bits");
    bounds->add_option("--out", out_path, "output file (default stdout)");
    bounds->add_option("--seed", seed, "reserved for sampling-backed checks");
    bounds->add_option("--config", config_path, "JSON config file; flags win on conflict");

    // ---- decompose ----
    auto* dec = app.add_subcommand("decompose", "Construct a decomposition and verify it");
    oimac::DecomposeRequest dreq;
    std::string dec_out;
    dec->add_option("--kind", dreq.kind,
                    "uniform-binary | uniform-contracted | exp-verdu | exp-binary | "
                    "truncexp-binary | truncexp-contracted | discrete-uniform | geometric | "
                    "truncgeom")
        ->required();
    dec->add_option("--a", dreq.a, "split point in (0,1)");
    dec->add_option("--k", dreq.k, "contraction factor");
    dec->add_option("--k1", dreq.k1, "inner support size parameter");
    dec->add_option("--n", dreq.n, "outer factor count");
    dec->add_option("--lambda", dreq.lambda, "rate / success parameter");
    dec->add_option("--lambda1", dreq.lambda1, "factor success parameter");
    dec->add_flag("--mc", dreq.monte_carlo, "enable the seeded Monte-Carlo KS check");
    dec->add_option("--seed", dreq.seed, "Monte-Carlo seed");
    dec->add_option("--out", dec_out, "output file (default stdout)");

    // ---- check ----
    auto* chk = app.add_subcommand("check", "Run a named property suite");
    std::string check_name;
    long n_max = 200;
    chk->add_option("name", check_name, "appendix-c | ordering | asymptotes")->required();
    chk->add_option("--n-max", n_max, "depth for appendix-c");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed()) {
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw oimac::CliError("cannot open config file: " + config_path);
                nlohmann::json cfg = nlohmann::json::parse(in);
                auto take = [&](CLI::Option* opt, const char* key, auto& value) {
                    if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<std::decay_t<decltype(value)>>();
                };
                take(o_family, "family", family);
                take(o_a1, "a1", a1);
                take(o_e1, "e1", e1);
                take(o_al1, "alpha1", alpha1);
                take(o_al2, "alpha2", alpha2);
                take(o_lo, "snr_lo", snr_lo);
                take(o_hi, "snr_hi", snr_hi);
                take(o_steps, "snr_steps", steps);
                take(o_units, "units", units);
                take(o_bounds, "bounds", bounds_list);
            }
            oimac::SweepRequest req;
            req.family = parse_family(family);
            req.a1 = a1;
            req.e1 = e1;
            req.alpha1 = alpha1;
            req.alpha2 = alpha2;
            req.snr_lo_db = snr_lo;
            req.snr_hi_db = snr_hi;
            req.steps = steps;
            if (units == "bits")
                req.bits = true;
            else if (units != "nats")
                throw oimac::CliError("unknown units: " + units);
            if (!bounds_list.empty()) {
                std::string cur;
                for (char c : bounds_list + ",") {
                    if (c == ',') {
                        if (!cur.empty()) req.bounds.push_back(cur);
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
            }
            write_output(out_path, oimac::run_bounds_csv(req));
        } else if (dec->parsed()) {
            write_output(dec_out, oimac::run_decompose_json(dreq).dump(2) + "\n");
        } else if (chk->parsed()) {
            const oimac::CheckResult res = oimac::run_check(check_name, n_max);
            std::cout << res.text;
            return res.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
