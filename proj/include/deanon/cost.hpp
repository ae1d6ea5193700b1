#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <vector>

#include "deanon/graph_model.hpp"
#include "deanon/sampler.hpp"

namespace deanon {

/// Per-block mismatch weights omega_ij = ln((1 - p s (2 - s)) / (p (1 - s)^2)).
///
/// At s = 1 every weight is +infinity: only matchings with zero mismatches
/// keep a finite cost.
class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(int k, std::vector<double> omega);

  /// omega == 1 everywhere: the plain edge-mismatch count.
  static WeightTable unit(int k);

  int k() const { return k_; }
  double operator()(int i, int j) const { return omega_[static_cast<std::size_t>(i * k_ + j)]; }
  double operator()(BlockIndex b) const { return (*this)(b.i, b.j); }
  const std::vector<double>& values() const { return omega_; }

 private:
  int k_ = 0;
  std::vector<double> omega_;
};

/// Single weight for edge probability p and sampling probability s.
double mismatch_weight(double p, double s);

/// Requires strict-valid params (every p_ij in (0, 1/2)).
WeightTable compute_weights(const ModelParams& params);

/// Extended-real cost: `infinite_units` counts mismatches on +infinity
/// weight blocks, `finite` sums the rest. Ordering is lexicographic, which is
/// the ordering of the extended reals with inf * 0 = 0.
struct ExtendedCost {
  std::int64_t infinite_units = 0;
  double finite = 0.0;

  double value() const {
    return infinite_units > 0 ? std::numeric_limits<double>::infinity() : finite;
  }

  auto operator<=>(const ExtendedCost&) const = default;
};

/// Sum of weights(b) * counts[b] over blocks i <= j, always in the same
/// order so equal count vectors give bit-identical totals.
ExtendedCost weighted_cost(const std::vector<std::int64_t>& counts, const WeightTable& weights);

struct CostBreakdown {
  int k = 0;
  /// Row-major k x k, symmetric; entry (i, j) with i <= j is the block count.
  std::vector<std::int64_t> per_block_mismatch;
  ExtendedCost weighted;
  std::int64_t unweighted_total = 0;

  std::int64_t mismatch(int i, int j) const {
    return per_block_mismatch[static_cast<std::size_t>(i * k + j)];
  }
  double weighted_total() const { return weighted.value(); }
};

/// Weighted mismatch cost of matching `pi`: for each block, the edges of g1
/// whose image is missing from g2 plus the edges of g2 whose preimage is
/// missing from g1.
CostBreakdown delta(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi,
                    const WeightTable& weights);

/// Smallest underlying graph consistent with both observations under `pi`,
/// in g1's labels: E(g1) united with pi^{-1}(E(g2)).
CommunityGraph union_graph(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi);

struct PosteriorScore {
  double log_score = 0.0;
  int k = 0;
  /// Row-major k x k union-graph block edge counts.
  std::vector<std::int64_t> per_block_union_edges;
};

/// Log posterior of `pi` up to a pi-independent constant:
/// sum over blocks of |E_union^{ij}| * ln(p (1 - s)^2 / (1 - p s (2 - s))).
PosteriorScore posterior_score(const CommunityGraph& g1, const CommunityGraph& g2,
                               const Matching& pi, const ModelParams& params);

/// Largest pair count oracle_posterior accepts (2^20 underlying graphs).
inline constexpr int kOraclePairLimit = 20;

/// Unnormalized posterior mass of `pi` by brute force: sums
/// p(g1 | g) p(g2 | g, pi) p(g) over every underlying graph g consistent with
/// both observations. Independent of the closed form above.
double oracle_posterior(const CommunityGraph& g1, const CommunityGraph& g2, const Matching& pi,
                        const ModelParams& params);

struct MapEquivalenceReport {
  std::vector<Matching> argmin_delta;
  std::vector<Matching> argmax_posterior;
  bool equal = false;
};

/// Enumerates every community-preserving matching and compares the set
/// minimizing the weighted cost with the set maximizing the brute-force
/// posterior. Posterior ties are resolved at relative tolerance 1e-9.
MapEquivalenceReport map_equivalence_check(const CommunityGraph& g1, const CommunityGraph& g2,
                                           const ModelParams& params);
MapEquivalenceReport map_equivalence_check(const DeanonInstance& instance);

}  // namespace deanon
