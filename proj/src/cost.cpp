#include "deanon/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deanon {

namespace {

void check_params_match(const CommunityGraph& g, const ModelParams& params) {
  if (g.community_sizes() != params.sizes) {
    throw ValidationError("graph community sizes do not match the model parameters");
  }
}

void mirror(std::vector<std::int64_t>& counts, int k) {
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      counts[static_cast<std::size_t>(j * k + i)] = counts[static_cast<std::size_t>(i * k + j)];
    }
  }
}

}  // namespace

WeightTable::WeightTable(int k, std::vector<double> omega) : k_(k), omega_(std::move(omega)) {
  if (omega_.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
    throw ValidationError("weight table must be k x k");
  }
}

WeightTable WeightTable::unit(int k) {
  return WeightTable(k, std::vector<double>(static_cast<std::size_t>(k * k), 1.0));
}

double mismatch_weight(double p, double s) {
  if (s >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log((1.0 - p * s * (2.0 - s)) / (p * (1.0 - s) * (1.0 - s)));
}

WeightTable compute_weights(const ModelParams& params) {
  validate_params(params, ValidationMode::kStrict);
  const int k = params.k();
  std::vector<double> omega(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      omega[static_cast<std::size_t>(i * k + j)] = mismatch_weight(params.p(i, j), params.sample_prob);
    }
  }
  return WeightTable(k, std::move(omega));
}

ExtendedCost weighted_cost(const std::vector<std::int64_t>& counts, const WeightTable& weights) {
  const int k = weights.k();
  ExtendedCost cost;
  // Counts are pooled per distinct weight before multiplying, so totals that
  // are equal as real numbers because two blocks share a weight are also
  // equal as doubles.
  std::vector<std::pair<double, std::int64_t>> pooled;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const std::int64_t c = counts[static_cast<std::size_t>(i * k + j)];
      if (c == 0) continue;
      const double w = weights(i, j);
      if (std::isinf(w)) {
        cost.infinite_units += c;
        continue;
      }
      auto it = std::find_if(pooled.begin(), pooled.end(), [w](const auto& e) { return e.first == w; });
      if (it == pooled.end()) {
        pooled.emplace_back(w, c);
      } else {
        it->second += c;
      }
    }
  }
  std::sort(pooled.begin(), pooled.end());
  for (const auto& [w, c] : pooled) cost.finite += w * static_cast<double>(c);
  return cost;
}

CostBreakdown delta(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi,
                    const WeightTable& weights) {
  require_same_layout(g1, g2);
  require_in_pi(pi, g1.community_of());
  const int k = weights.k();
  if (g1.k() > k) throw ValidationError("weight table has fewer communities than the graph");

  CostBreakdown out;
  out.k = k;
  out.per_block_mismatch.assign(static_cast<std::size_t>(k * k), 0);
  auto bump = [&](const Edge& e, const CommunityGraph& g) {
    const BlockIndex b = g.block_of(e.u, e.v);
    ++out.per_block_mismatch[static_cast<std::size_t>(b.i * k + b.j)];
  };

  for (const Edge& e : g1.edges()) {
    if (!g2.has_edge(pi(e.u), pi(e.v))) bump(e, g1);
  }
  const Matching inv = pi.inverse();
  for (const Edge& e : g2.edges()) {
    if (!g1.has_edge(inv(e.u), inv(e.v))) bump(e, g2);
  }
  mirror(out.per_block_mismatch, k);

  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) out.unweighted_total += out.mismatch(i, j);
  }
  out.weighted = weighted_cost(out.per_block_mismatch, weights);
  return out;
}

CommunityGraph union_graph(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi) {
  require_same_layout(g1, g2);
  require_in_pi(pi, g1.community_of());
  std::vector<Edge> edges = g1.edges();
  const Matching inv = pi.inverse();
  for (const Edge& e : g2.edges()) edges.push_back(inv(e));
  return CommunityGraph(g1.community_of(), std::move(edges));
}

PosteriorScore posterior_score(const CommunityGraph& g1, const CommunityGraph& g2,
                               const Matching& pi, const ModelParams& params) {
  validate_params(params, ValidationMode::kStrict);
  check_params_match(g1, params);
  const CommunityGraph gstar = union_graph(g1, g2, pi);
  PosteriorScore score;
  score.k = params.k();
  score.per_block_union_edges = gstar.block_edge_counts();
  score.per_block_union_edges.resize(static_cast<std::size_t>(score.k * score.k), 0);

  const double s = params.sample_prob;
  for (int i = 0; i < score.k; ++i) {
    for (int j = i; j < score.k; ++j) {
      const std::int64_t edges = score.per_block_union_edges[static_cast<std::size_t>(i * score.k + j)];
      if (edges == 0) continue;
      const double pij = params.p(i, j);
      const double per_edge = std::log(pij * (1.0 - s) * (1.0 - s) / (1.0 - pij * s * (2.0 - s)));
      score.log_score += per_edge * static_cast<double>(edges);
    }
  }
  return score;
}

double oracle_posterior(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi,
                        const ModelParams& params) {
  validate_params(params, ValidationMode::kGenerationOnly);
  require_same_layout(g1, g2);
  require_in_pi(pi, g1.community_of());
  check_params_match(g1, params);

  const int n = g1.n();
  const long pairs_total = static_cast<long>(n) * (n - 1) / 2;
  if (pairs_total > kOraclePairLimit) {
    throw BudgetExceeded("oracle enumeration needs at most " + std::to_string(kOraclePairLimit) +
                         " node pairs, instance has " + std::to_string(pairs_total));
  }

  struct PairState {
    double p;
    bool in_g1;
    bool in_g2;
    bool forced;
  };
  std::vector<PairState> pairs;
  std::vector<std::size_t> free_pairs;
  for (Node u = 0; u < n; ++u) {
    for (Node v = u + 1; v < n; ++v) {
      PairState st{params.p(g1.community(u), g1.community(v)), g1.has_edge(u, v),
                   g2.has_edge(pi(u), pi(v)), false};
      st.forced = st.in_g1 || st.in_g2;
      if (!st.forced) free_pairs.push_back(pairs.size());
      pairs.push_back(st);
    }
  }

  const double s = params.sample_prob;
  const std::uint64_t combos = std::uint64_t{1} << free_pairs.size();
  std::vector<char> present(pairs.size());
  double mass = 0.0;
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) present[idx] = pairs[idx].forced;
    for (std::size_t b = 0; b < free_pairs.size(); ++b) {
      if ((mask >> b) & 1U) present[free_pairs[b]] = 1;
    }
    // p(g) * p(g1 | g) * p(g2 | g, pi), pair by pair.
    double term = 1.0;
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
      const PairState& st = pairs[idx];
      if (present[idx]) {
        term *= st.p * (st.in_g1 ? s : 1.0 - s) * (st.in_g2 ? s : 1.0 - s);
      } else {
        term *= 1.0 - st.p;
      }
    }
    mass += term;
  }
  return mass;
}

MapEquivalenceReport map_equivalence_check(const CommunityGraph& g1, const CommunityGraph& g2,
                                           const ModelParams& params) {
  const WeightTable weights = compute_weights(params);
  check_params_match(g1, params);
  if (pi_cardinality(params.sizes) > 1e6) {
    throw BudgetExceeded("matching set too large for an exhaustive MAP check");
  }

  std::vector<std::pair<Matching, ExtendedCost>> costs;
  std::vector<std::pair<Matching, double>> masses;
  for_each_matching(g1.community_of(), [&](const Matching& pi) {
    costs.emplace_back(pi, delta(g1, g2, pi, weights).weighted);
    masses.emplace_back(pi, oracle_posterior(g1, g2, pi, params));
    return true;
  });

  MapEquivalenceReport report;
  const ExtendedCost best_cost =
      std::min_element(costs.begin(), costs.end(),
                       [](const auto& a, const auto& b) { return a.second < b.second; })
          ->second;
  for (const auto& [pi, c] : costs) {
    if (c == best_cost) report.argmin_delta.push_back(pi);
  }
  const double best_mass =
      std::max_element(masses.begin(), masses.end(),
                       [](const auto& a, const auto& b) { return a.second < b.second; })
          ->second;
  for (const auto& [pi, m] : masses) {
    if (m >= best_mass * (1.0 - 1e-9)) report.argmax_posterior.push_back(pi);
  }
  report.equal = report.argmin_delta == report.argmax_posterior;
  return report;
}

MapEquivalenceReport map_equivalence_check(const DeanonInstance& instance) {
  return map_equivalence_check(instance.g1, instance.g2, instance.params);
}

}  // namespace deanon
