#include "deanon/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "deanon/random.hpp"

namespace deanon {

namespace {

// Maps blocks onto distinct-weight classes so an ExtendedCost can be
// evaluated from integer counts without allocation. Gives the same doubles
// as weighted_cost(): classes are summed in ascending weight order.
class ClassCost {
 public:
  ClassCost(const WeightTable& weights, int k) : k_(k) {
    block_class_.assign(static_cast<std::size_t>(k * k), -1);
    std::vector<double> finite;
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        const double w = weights(i, j);
        if (!std::isinf(w)) finite.push_back(w);
      }
    }
    std::sort(finite.begin(), finite.end());
    finite.erase(std::unique(finite.begin(), finite.end()), finite.end());
    weights_ = finite;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const double w = weights(i, j);
        int cls = kInfiniteClass;
        if (!std::isinf(w)) {
          cls = static_cast<int>(std::lower_bound(weights_.begin(), weights_.end(), w) - weights_.begin());
        }
        block_class_[static_cast<std::size_t>(i * k + j)] = cls;
      }
    }
  }

  int num_classes() const { return static_cast<int>(weights_.size()) + 1; }
  /// Index of the +infinity class is the last one.
  int class_of(int ci, int cj) const {
    const int cls = block_class_[static_cast<std::size_t>(ci * k_ + cj)];
    return cls == kInfiniteClass ? static_cast<int>(weights_.size()) : cls;
  }

  ExtendedCost evaluate(const std::vector<std::int64_t>& class_counts) const {
    ExtendedCost cost;
    cost.infinite_units = class_counts.back();
    for (std::size_t c = 0; c < weights_.size(); ++c) {
      if (class_counts[c] != 0) cost.finite += weights_[c] * static_cast<double>(class_counts[c]);
    }
    return cost;
  }

 private:
  static constexpr int kInfiniteClass = -2;
  int k_;
  std::vector<int> block_class_;
  std::vector<double> weights_;
};

void check_inputs(const CommunityGraph& g1, const CommunityGraph& g2, const WeightTable& weights) {
  require_same_layout(g1, g2);
  if (g1.k() > weights.k()) throw ValidationError("weight table has fewer communities than the graph");
}

void finish_ties(MatchResult& result) {
  std::sort(result.tie_set.begin(), result.tie_set.end());
}

class BranchAndBound {
 public:
  BranchAndBound(const CommunityGraph& g1, const CommunityGraph& g2, const WeightTable& weights,
                 const ExactOptions& options)
      : g1_(g1), g2_(g2), classes_(weights, weights.k()), options_(options) {
    const int n = g1.n();
    const std::vector<int> sizes = g1.community_sizes();
    order_.resize(static_cast<std::size_t>(n));
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](Node a, Node b) {
      const int ca = g1.community(a);
      const int cb = g1.community(b);
      if (ca != cb) {
        const int sa = sizes[static_cast<std::size_t>(ca)];
        const int sb = sizes[static_cast<std::size_t>(cb)];
        return sa != sb ? sa > sb : ca < cb;
      }
      return g1.degree(a) > g1.degree(b);
    });
    for (Node v = 0; v < n; ++v) {
      candidates_.resize(static_cast<std::size_t>(g1.k()));
      candidates_[static_cast<std::size_t>(g1.community(v))].push_back(v);
    }
    forward_.assign(static_cast<std::size_t>(n), -1);
    used_.assign(static_cast<std::size_t>(n), 0);
    counts_.assign(static_cast<std::size_t>(classes_.num_classes()), 0);
    scratch_.assign(static_cast<std::size_t>(n), counts_);
  }

  void run(MatchResult& result) {
    result_ = &result;
    descend(0);
    result.best = Matching(best_forward_);
  }

 private:
  void descend(std::size_t depth) {
    ++result_->nodes_explored;
    const ExtendedCost partial = classes_.evaluate(counts_);
    if (have_best_ && partial > best_) return;
    if (depth == order_.size()) {
      record_leaf(partial);
      return;
    }
    const Node u = order_[depth];
    const int cu = g1_.community(u);
    for (Node t : candidates_[static_cast<std::size_t>(cu)]) {
      if (used_[static_cast<std::size_t>(t)]) continue;
      // Pairs (u, w) for every already placed w become fully determined.
      std::vector<std::int64_t>& added = scratch_[depth];
      std::fill(added.begin(), added.end(), 0);
      for (std::size_t d = 0; d < depth; ++d) {
        const Node w = order_[d];
        const Node tw = forward_[static_cast<std::size_t>(w)];
        if (g1_.has_edge(u, w) != g2_.has_edge(t, tw)) {
          const int cls = classes_.class_of(cu, g1_.community(w));
          ++counts_[static_cast<std::size_t>(cls)];
          ++added[static_cast<std::size_t>(cls)];
        }
      }
      used_[static_cast<std::size_t>(t)] = 1;
      forward_[static_cast<std::size_t>(u)] = t;
      descend(depth + 1);
      forward_[static_cast<std::size_t>(u)] = -1;
      used_[static_cast<std::size_t>(t)] = 0;
      for (std::size_t cls = 0; cls < added.size(); ++cls) counts_[cls] -= added[cls];
    }
  }

  void record_leaf(const ExtendedCost& cost) {
    if (!have_best_ || cost < best_) {
      have_best_ = true;
      best_ = cost;
      best_forward_ = forward_;
      result_->tie_set.clear();
      result_->tie_count = 0;
      result_->tie_set_truncated = false;
    } else if (forward_ < best_forward_) {
      best_forward_ = forward_;
    }
    ++result_->tie_count;
    if (result_->tie_set.size() < options_.tie_limit) {
      result_->tie_set.emplace_back(forward_);
    } else {
      result_->tie_set_truncated = true;
    }
  }

  const CommunityGraph& g1_;
  const CommunityGraph& g2_;
  ClassCost classes_;
  const ExactOptions& options_;
  std::vector<Node> order_;
  std::vector<std::vector<Node>> candidates_;
  std::vector<Node> forward_;
  std::vector<Node> best_forward_;
  std::vector<char> used_;
  std::vector<std::int64_t> counts_;
  std::vector<std::vector<std::int64_t>> scratch_;
  ExtendedCost best_;
  bool have_best_ = false;
  MatchResult* result_ = nullptr;
};

}  // namespace

MatchResult exact_match(const CommunityGraph& g1, const CommunityGraph& g2,
                        const WeightTable& weights, const ExactOptions& options) {
  check_inputs(g1, g2, weights);
  const double size = pi_cardinality(g1.community_sizes());
  if (!options.ignore_budget && size > options.budget) {
    throw BudgetExceeded("exact search over " + std::to_string(size) +
                         " matchings exceeds budget " + std::to_string(options.budget));
  }
  MatchResult result;
  result.mode = MatchMode::kExact;
  BranchAndBound search(g1, g2, weights, options);
  search.run(result);
  finish_ties(result);
  result.best_cost = delta(g1, g2, result.best, weights);
  return result;
}

MatchResult brute_force_match(const CommunityGraph& g1, const CommunityGraph& g2,
                              const WeightTable& weights) {
  check_inputs(g1, g2, weights);
  MatchResult result;
  result.mode = MatchMode::kExact;
  bool have = false;
  for_each_matching(g1.community_of(), [&](const Matching& pi) {
    ++result.nodes_explored;
    CostBreakdown c = delta(g1, g2, pi, weights);
    if (!have || c.weighted < result.best_cost.weighted) {
      have = true;
      result.best_cost = std::move(c);
      result.tie_set.clear();
      result.tie_set.push_back(pi);
    } else if (c.weighted == result.best_cost.weighted) {
      result.tie_set.push_back(pi);
    }
    return true;
  });
  // Enumeration is lexicographic, so the first tie is the smallest.
  result.best = result.tie_set.front();
  result.best_cost = delta(g1, g2, result.best, weights);
  result.tie_count = result.tie_set.size();
  return result;
}

MatchResult local_search_match(const CommunityGraph& g1, const CommunityGraph& g2,
                               const WeightTable& weights, const LocalSearchOptions& options) {
  check_inputs(g1, g2, weights);
  if (options.restarts < 1) throw ValidationError("local search needs at least one restart");
  if (options.start) require_in_pi(*options.start, g1.community_of());

  const int n = g1.n();
  const ClassCost classes(weights, weights.k());
  std::vector<std::vector<Node>> members(static_cast<std::size_t>(g1.k()));
  for (Node v = 0; v < n; ++v) members[static_cast<std::size_t>(g1.community(v))].push_back(v);

  MatchResult result;
  result.mode = MatchMode::kLocalSearch;
  bool have = false;
  ExtendedCost best_cost;

  for (int r = 0; r < options.restarts; ++r) {
    std::vector<Node> forward;
    if (r == 0 && options.start) {
      forward = options.start->forward();
    } else {
      Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
      forward.resize(static_cast<std::size_t>(n));
      for (const auto& group : members) {
        std::vector<Node> targets = group;
        for (std::size_t i = targets.size(); i > 1; --i) {
          std::swap(targets[i - 1], targets[rng.below(i)]);
        }
        for (std::size_t i = 0; i < group.size(); ++i) forward[static_cast<std::size_t>(group[i])] = targets[i];
      }
    }

    // Mismatch counts per weight class for the current matching.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(classes.num_classes()), 0);
    auto mismatched = [&](Node a, Node b, Node ta, Node tb) { return g1.has_edge(a, b) != g2.has_edge(ta, tb); };
    for (Node a = 0; a < n; ++a) {
      for (Node b = a + 1; b < n; ++b) {
        if (mismatched(a, b, forward[static_cast<std::size_t>(a)], forward[static_cast<std::size_t>(b)])) {
          ++counts[static_cast<std::size_t>(classes.class_of(g1.community(a), g1.community(b)))];
        }
      }
    }
    ExtendedCost current = classes.evaluate(counts);

    std::vector<std::int64_t> trial(counts.size());
    while (true) {
      bool improved = false;
      ExtendedCost best_move_cost = current;
      std::vector<std::int64_t> best_move_counts;
      Node best_a = -1;
      Node best_b = -1;
      for (const auto& group : members) {
        for (std::size_t i = 0; i < group.size(); ++i) {
          for (std::size_t j = i + 1; j < group.size(); ++j) {
            const Node a = group[i];
            const Node b = group[j];
            const Node ta = forward[static_cast<std::size_t>(a)];
            const Node tb = forward[static_cast<std::size_t>(b)];
            ++result.nodes_explored;
            trial = counts;
            // The pair (a, b) maps onto itself either way.
            for (Node w = 0; w < n; ++w) {
              if (w == a || w == b) continue;
              const Node tw = forward[static_cast<std::size_t>(w)];
              const auto cls_a = static_cast<std::size_t>(classes.class_of(g1.community(a), g1.community(w)));
              const auto cls_b = static_cast<std::size_t>(classes.class_of(g1.community(b), g1.community(w)));
              trial[cls_a] += static_cast<std::int64_t>(mismatched(a, w, tb, tw)) -
                              static_cast<std::int64_t>(mismatched(a, w, ta, tw));
              trial[cls_b] += static_cast<std::int64_t>(mismatched(b, w, ta, tw)) -
                              static_cast<std::int64_t>(mismatched(b, w, tb, tw));
            }
            const ExtendedCost c = classes.evaluate(trial);
            if (c < best_move_cost) {
              best_move_cost = c;
              best_move_counts = trial;
              best_a = a;
              best_b = b;
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
      if (best_move_cost > current) throw std::logic_error("local search cost increased");
      std::swap(forward[static_cast<std::size_t>(best_a)], forward[static_cast<std::size_t>(best_b)]);
      counts = std::move(best_move_counts);
      current = best_move_cost;
    }

    Matching m(std::move(forward));
    if (!have || current < best_cost || (current == best_cost && m < result.best)) {
      have = true;
      best_cost = current;
      result.best = std::move(m);
    }
  }

  result.best_cost = delta(g1, g2, result.best, weights);
  result.tie_set = {result.best};
  result.tie_count = 1;
  return result;
}

SuccessReport score_success(const Matching& estimate, const Matching& truth,
                            std::span<const int> community_of) {
  if (estimate.n() != truth.n() || static_cast<std::size_t>(truth.n()) != community_of.size()) {
    throw ValidationError("estimate, truth and community labels disagree on node count");
  }
  require_in_pi(estimate, community_of);
  require_in_pi(truth, community_of);
  SuccessReport report;
  int k = 0;
  for (int c : community_of) k = std::max(k, c + 1);
  report.mismatch_counts.assign(static_cast<std::size_t>(k), 0);
  int correct = 0;
  for (Node v = 0; v < truth.n(); ++v) {
    if (estimate(v) == truth(v)) {
      ++correct;
    } else {
      ++report.mismatch_counts[static_cast<std::size_t>(community_of[static_cast<std::size_t>(v)])];
    }
  }
  report.perfect = correct == truth.n();
  report.fraction_correct = truth.n() == 0 ? 1.0 : static_cast<double>(correct) / truth.n();
  return report;
}

}  // namespace deanon
