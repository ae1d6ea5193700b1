#pragma once

#include "json.hpp"

#include "deanon/analysis.hpp"
#include "deanon/cost.hpp"
#include "deanon/graph_model.hpp"
#include "deanon/matcher.hpp"
#include "deanon/sampler.hpp"

namespace deanon::io {

using nlohmann::json;

json to_json(const ModelParams& params);
/// Accepts {sizes, edge_prob (k x k nested), sample_prob}; "k" is optional
/// and checked against sizes when present. Not validated here.
ModelParams params_from_json(const json& j);

json to_json(const CommunityGraph& g);
CommunityGraph graph_from_json(const json& j);

json to_json(const Matching& m);
Matching matching_from_json(const json& j);

json to_json(const DeanonInstance& instance);
/// Validates the bundle: truth in the matching set and graphs on the params' layout.
DeanonInstance instance_from_json(const json& j);

/// Extended reals: finite numbers as-is, +infinity as the string "inf".
json extended(double x);

json to_json(const WeightTable& w);
json to_json(const CostBreakdown& c);
json to_json(const MatchResult& r);
json to_json(const SuccessReport& r);
json to_json(const ThresholdReport& r);
json to_json(const ExpectedSBound& b);

}  // namespace deanon::io
