#include "oimac/dist_json.hpp"

namespace oimac {

using nlohmann::json;

json to_json(const ScalarDist& d) {
    json j;
    j["kind"] = kind_name(d);
    std::visit(
        [&j](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                j["lo"] = v.lo;
                j["hi"] = v.hi;
            } else if constexpr (std::is_same_v<T, DiscreteUniformSpaced>) {
                j["offset"] = v.offset;
                j["spacing"] = v.spacing;
                j["count"] = v.count;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                j["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, TruncExp>) {
                j["width"] = v.width;
                j["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                j["success"] = v.success;
            } else if constexpr (std::is_same_v<T, TruncGeomSpaced>) {
                j["success"] = v.success;
                j["spacing"] = v.spacing;
                j["count"] = v.count;
            } else if constexpr (std::is_same_v<T, AtomPlusExponential>) {
                j["atom_weight"] = v.atom_weight;
                j["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, AtomPlusGeometric>) {
                j["atom_weight"] = v.atom_weight;
                j["success"] = v.success;
            } else if constexpr (std::is_same_v<T, BernoulliSeries>) {
                json terms = json::array();
                for (const auto& term : v.terms)
                    terms.push_back({{"value", term.value}, {"prob_one", term.prob_one}});
                j["terms"] = std::move(terms);
                j["tail_eps"] = v.tail_eps;
            } else {
                json atoms = json::array();
                for (const auto& [x, p] : v.atoms)
                    atoms.push_back({{"point", x}, {"prob", p}});
                j["atoms"] = std::move(atoms);
            }
        },
        d);
    return j;
}

ScalarDist dist_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    ScalarDist d;
    if (kind == "uniform") {
        d = Uniform{j.at("lo").get<double>(), j.at("hi").get<double>()};
    } else if (kind == "discrete_uniform_spaced") {
        d = DiscreteUniformSpaced{j.at("offset").get<double>(), j.at("spacing").get<double>(),
                                  j.at("count").get<long>()};
    } else if (kind == "exponential") {
        d = Exponential{j.at("rate").get<double>()};
    } else if (kind == "trunc_exp") {
        d = TruncExp{j.at("width").get<double>(), j.at("rate").get<double>()};
    } else if (kind == "geometric") {
        d = Geometric{j.at("success").get<double>()};
    } else if (kind == "trunc_geom_spaced") {
        d = TruncGeomSpaced{j.at("success").get<double>(), j.at("spacing").get<double>(),
                            j.at("count").get<long>()};
    } else if (kind == "atom_plus_exponential") {
        d = AtomPlusExponential{j.at("atom_weight").get<double>(), j.at("rate").get<double>()};
    } else if (kind == "atom_plus_geometric") {
        d = AtomPlusGeometric{j.at("atom_weight").get<double>(), j.at("success").get<double>()};
    } else if (kind == "bernoulli_series") {
        BernoulliSeries s;
        for (const auto& term : j.at("terms"))
            s.terms.push_back({term.at("value").get<double>(), term.at("prob_one").get<double>()});
        s.tail_eps = j.value("tail_eps", 0.0);
        d = std::move(s);
    } else if (kind == "finite_discrete") {
        FiniteDiscrete f;
        for (const auto& atom : j.at("atoms"))
            f.atoms.emplace_back(atom.at("point").get<double>(), atom.at("prob").get<double>());
        d = std::move(f);
    } else {
        throw DistError("unknown distribution kind: " + kind);
    }
    validate(d);
    return d;
}

}  // namespace oimac
