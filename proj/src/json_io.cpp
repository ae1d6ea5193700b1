#include "deanon/json_io.hpp"

#include <array>
#include <cmath>
#include <string>

namespace deanon::io {

namespace {

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field \"") + key + "\": " + e.what());
  }
}

json blocks_json(int k, const std::vector<std::int64_t>& counts) {
  json out = json::array();
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      out.push_back({{"block", {i, j}}, {"count", counts[static_cast<std::size_t>(i * k + j)]}});
    }
  }
  return out;
}

json threshold_json(const CommunityThreshold& t) {
  return {{"lhs_c1", t.lhs_c1},         {"lhs_c2", t.lhs_c2},
          {"rhs", t.rhs},               {"slack_c1", t.slack_c1},
          {"slack_c2", t.slack_c2},     {"satisfied_c1", t.satisfied_c1},
          {"satisfied_c2", t.satisfied_c2}};
}

}  // namespace

json to_json(const ModelParams& params) {
  json rows = json::array();
  for (int i = 0; i < params.k(); ++i) {
    json row = json::array();
    for (int j = 0; j < params.k(); ++j) row.push_back(params.p(i, j));
    rows.push_back(std::move(row));
  }
  return {{"k", params.k()}, {"sizes", params.sizes}, {"edge_prob", rows}, {"sample_prob", params.sample_prob}};
}

ModelParams params_from_json(const json& j) {
  ModelParams params;
  params.sizes = require<std::vector<int>>(j, "sizes");
  const auto rows = require<std::vector<std::vector<double>>>(j, "edge_prob");
  params.sample_prob = require<double>(j, "sample_prob");
  if (j.contains("k") && require<int>(j, "k") != params.k()) {
    throw ValidationError("\"k\" does not match the number of sizes");
  }
  if (rows.size() != params.sizes.size()) throw ValidationError("edge_prob must have k rows");
  for (const auto& row : rows) {
    if (row.size() != params.sizes.size()) throw ValidationError("edge_prob must have k columns");
    params.edge_prob.insert(params.edge_prob.end(), row.begin(), row.end());
  }
  return params;
}

json to_json(const CommunityGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  return {{"n", g.n()}, {"community_of", g.community_of()}, {"edges", edges}};
}

CommunityGraph graph_from_json(const json& j) {
  const int n = require<int>(j, "n");
  auto community_of = require<std::vector<int>>(j, "community_of");
  if (static_cast<int>(community_of.size()) != n) throw ValidationError("community_of must have n entries");
  const auto raw = require<std::vector<std::array<int, 2>>>(j, "edges");
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) {
    if (u == v) throw ValidationError("self-loop at node " + std::to_string(u));
    edges.emplace_back(u, v);
  }
  return CommunityGraph(std::move(community_of), std::move(edges));
}

json to_json(const Matching& m) { return m.forward(); }

Matching matching_from_json(const json& j) {
  if (j.is_object()) return Matching(require<std::vector<Node>>(j, "forward"));
  try {
    return Matching(j.get<std::vector<Node>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("matching must be an array of node labels: ") + e.what());
  }
}

json to_json(const DeanonInstance& instance) {
  return {{"params", to_json(instance.params)},
          {"g", to_json(instance.g)},
          {"g1", to_json(instance.g1)},
          {"g2", to_json(instance.g2)},
          {"truth", to_json(instance.truth)},
          {"seeds",
           {{"master", instance.seeds.master},
            {"graph", instance.seeds.graph},
            {"sample1", instance.seeds.sample1},
            {"sample2", instance.seeds.sample2},
            {"permutation", instance.seeds.permutation}}}};
}

DeanonInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("instance must be a JSON object");
  DeanonInstance inst;
  inst.params = validate_params(params_from_json(require<json>(j, "params")), ValidationMode::kGenerationOnly);
  inst.g = graph_from_json(require<json>(j, "g"));
  inst.g1 = graph_from_json(require<json>(j, "g1"));
  inst.g2 = graph_from_json(require<json>(j, "g2"));
  inst.truth = matching_from_json(require<json>(j, "truth"));
  const json seeds = require<json>(j, "seeds");
  inst.seeds = InstanceSeeds{require<std::uint64_t>(seeds, "master"), require<std::uint64_t>(seeds, "graph"),
                             require<std::uint64_t>(seeds, "sample1"), require<std::uint64_t>(seeds, "sample2"),
                             require<std::uint64_t>(seeds, "permutation")};
  if (inst.g.community_of() != contiguous_communities(inst.params.sizes)) {
    throw ValidationError("graph layout does not match params sizes");
  }
  require_same_layout(inst.g, inst.g1);
  require_same_layout(inst.g, inst.g2);
  require_in_pi(inst.truth, inst.g.community_of());
  return inst;
}

json extended(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json to_json(const WeightTable& w) {
  json rows = json::array();
  for (int i = 0; i < w.k(); ++i) {
    json row = json::array();
    for (int j = 0; j < w.k(); ++j) row.push_back(extended(w(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const CostBreakdown& c) {
  return {{"per_block_mismatch", blocks_json(c.k, c.per_block_mismatch)},
          {"weighted_total", extended(c.weighted_total())},
          {"infinite_weight_mismatches", c.weighted.infinite_units},
          {"unweighted_total", c.unweighted_total}};
}

json to_json(const MatchResult& r) {
  json ties = json::array();
  for (const Matching& m : r.tie_set) ties.push_back(to_json(m));
  return {{"mode", r.mode == MatchMode::kExact ? "exact" : "local"},
          {"best", to_json(r.best)},
          {"best_cost", to_json(r.best_cost)},
          {"tie_set", ties},
          {"tie_count", r.tie_count},
          {"tie_set_truncated", r.tie_set_truncated},
          {"nodes_explored", r.nodes_explored}};
}

json to_json(const SuccessReport& r) {
  return {{"perfect", r.perfect}, {"fraction_correct", r.fraction_correct}, {"mismatch_counts", r.mismatch_counts}};
}

json to_json(const ThresholdReport& r) {
  json comms = json::array();
  for (const auto& t : r.communities) comms.push_back(threshold_json(t));
  json out = {{"communities", comms}, {"q_exceeds_p", r.q_exceeds_p}};
  out["single_community"] = r.single_community ? threshold_json(*r.single_community) : json(nullptr);
  return out;
}

json to_json(const ExpectedSBound& b) {
  json terms = json::array();
  for (const auto& t : b.terms) terms.push_back({{"k1", t.k1}, {"k2", t.k2}, {"log_term", t.log_term}});
  return {{"a1", b.a1},           {"a2", b.a2},     {"log_total", b.log_total}, {"total", extended(b.total)},
          {"below_one", b.below_one}, {"terms", terms}};
}

}  // namespace deanon::io
