#pragma once

#include "oimac/dist.hpp"

#include <json.hpp>

// JSON form of a distribution spec: an object {"kind": ..., params...} with
// an optional "tail_eps" for truncated Bernoulli series. Field names are
// frozen in schemas/distribution_schema.json.

namespace oimac {

nlohmann::json to_json(const ScalarDist& d);
ScalarDist dist_from_json(const nlohmann::json& j);

}  // namespace oimac
