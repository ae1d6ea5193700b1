#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "deanon/error.hpp"

namespace deanon {

using Node = int;

/// Undirected node pair stored as (min, max).
struct Edge {
  Node u = 0;
  Node v = 0;

  Edge() = default;
  Edge(Node a, Node b) : u(a < b ? a : b), v(a < b ? b : a) {}

  auto operator<=>(const Edge&) const = default;
};

/// Unordered community pair, `i <= j`, zero-based.
struct BlockIndex {
  int i = 0;
  int j = 0;

  BlockIndex() = default;
  BlockIndex(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  auto operator<=>(const BlockIndex&) const = default;
};

/// Stochastic block model parameters.
///
/// Communities are zero-based; community `c` owns the contiguous node range
/// starting at `sizes[0] + ... + sizes[c-1]`. `edge_prob` is a row-major
/// k x k matrix.
struct ModelParams {
  std::vector<int> sizes;
  std::vector<double> edge_prob;
  double sample_prob = 1.0;

  int k() const { return static_cast<int>(sizes.size()); }
  int n() const;
  double p(int i, int j) const { return edge_prob[static_cast<std::size_t>(i * k() + j)]; }

  /// Two communities with p11 = p22 = p and p12 = q.
  static ModelParams two_community(int n1, int n2, double p, double q, double s);
  static ModelParams single_community(int n, double p, double s);

  bool operator==(const ModelParams&) const = default;
};

enum class ValidationMode {
  /// Every p_ij in (0, 1/2) and s in (0, 1]: the regime where the weighted
  /// mismatch cost is the MAP estimator.
  kStrict,
  /// Probabilities only need to lie in [0, 1] (s still in (0, 1]).
  kGenerationOnly,
};

/// Returns `params` unchanged or throws ValidationError naming the first bad
/// entry (e.g. "p11", one-based as in the usual block notation).
ModelParams validate_params(const ModelParams& params, ValidationMode mode);

/// Community label per node for the contiguous layout of `sizes`.
std::vector<int> contiguous_communities(std::span<const int> sizes);

/// N^{ij}: number of node pairs with one end in community i and the other in j.
std::int64_t block_pair_count(const ModelParams& params, BlockIndex block);

/// Simple undirected graph with a community label on every node.
///
/// Immutable once built. Edges are kept both as a sorted canonical list and
/// as a dense adjacency bitset for O(1) membership.
class CommunityGraph {
 public:
  CommunityGraph() = default;

  /// Canonicalizes and deduplicates `edges`. Throws on self-loops, nodes out
  /// of range or negative community labels.
  CommunityGraph(std::vector<int> community_of, std::vector<Edge> edges);

  int n() const { return static_cast<int>(community_of_.size()); }
  int k() const { return k_; }
  int community(Node v) const { return community_of_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& community_of() const { return community_of_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(Node a, Node b) const {
    const auto idx = static_cast<std::size_t>(a) * words_ + (static_cast<std::size_t>(b) >> 6);
    return (bits_[idx] >> (b & 63)) & 1U;
  }

  int degree(Node v) const { return degree_[static_cast<std::size_t>(v)]; }

  /// Community pair of the endpoints; throws for a self-pair.
  BlockIndex block_of(Node a, Node b) const;

  /// Per-block edge counts, row-major k x k (symmetric, (i,j) and (j,i) equal).
  std::vector<std::int64_t> block_edge_counts() const;

  /// Sizes of each community.
  std::vector<int> community_sizes() const;

  bool operator==(const CommunityGraph& other) const {
    return community_of_ == other.community_of_ && edges_ == other.edges_;
  }

 private:
  std::vector<int> community_of_;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> bits_;
  std::vector<int> degree_;
  std::size_t words_ = 0;
  int k_ = 0;
};

/// Samples a stochastic block model graph: every pair is an edge
/// independently with probability p_ij. Pure function of (params, seed).
CommunityGraph generate_sbm(const ModelParams& params, std::uint64_t seed);

/// Checks that two graphs live on the same node set with the same labels.
void require_same_layout(const CommunityGraph& a, const CommunityGraph& b);

}  // namespace deanon
