#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deanon/cost.hpp"
#include "deanon/graph_model.hpp"
#include "deanon/sampler.hpp"

namespace deanon {

enum class MatchMode { kExact, kLocalSearch };

struct MatchResult {
  Matching best;
  CostBreakdown best_cost;
  /// Every matching attaining best_cost, lexicographically sorted. Exact mode
  /// only; local search reports just `best`.
  std::vector<Matching> tie_set;
  /// Size of the full tie set, even when `tie_set` was truncated.
  std::uint64_t tie_count = 0;
  bool tie_set_truncated = false;
  std::uint64_t nodes_explored = 0;
  MatchMode mode = MatchMode::kExact;
};

struct ExactOptions {
  /// Refuse to search when the product of n_i! exceeds this.
  double budget = 1e8;
  bool ignore_budget = false;
  /// Stop storing tie-set members past this many (tie_count stays exact).
  std::size_t tie_limit = 1'000'000;
};

/// Global minimizer of the weighted mismatch cost over all community-
/// preserving matchings, by branch and bound.
///
/// g1 nodes are assigned community by community (largest community first),
/// highest g1-degree first. Each assignment fixes the cost of every pair
/// between the new node and already assigned nodes, so the partial cost is
/// a lower bound and branches strictly worse than the incumbent are cut.
/// Ties are kept, never broken: `best` is the lexicographically smallest
/// member of the tie set.
MatchResult exact_match(const CommunityGraph& g1, const CommunityGraph& g2,
                        const WeightTable& weights, const ExactOptions& options = {});

/// Same result as exact_match, by plain enumeration of every matching with
/// delta(). Reference implementation for tests and small instances.
MatchResult brute_force_match(const CommunityGraph& g1, const CommunityGraph& g2,
                              const WeightTable& weights);

struct LocalSearchOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  /// Starting point of the first restart; the others start uniformly at random.
  std::optional<Matching> start;
};

/// Steepest descent over within-community transpositions, restarted
/// `restarts` times. Returns the best swap-local minimum found.
MatchResult local_search_match(const CommunityGraph& g1, const CommunityGraph& g2,
                               const WeightTable& weights, const LocalSearchOptions& options);

struct SuccessReport {
  bool perfect = false;
  double fraction_correct = 0.0;
  /// Wrongly matched nodes per community.
  std::vector<int> mismatch_counts;
};

SuccessReport score_success(const Matching& estimate, const Matching& truth,
                            std::span<const int> community_of);

}  // namespace deanon
