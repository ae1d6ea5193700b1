#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "deanon/graph_model.hpp"

namespace deanon {

/// Bijection on node labels, mapping public-graph labels to anonymized-graph
/// labels.
class Matching {
 public:
  Matching() = default;
  /// Throws ValidationError if `forward` is not a permutation of 0..n-1.
  explicit Matching(std::vector<Node> forward);

  static Matching identity(int n);

  int n() const { return static_cast<int>(forward_.size()); }
  Node operator()(Node v) const { return forward_[static_cast<std::size_t>(v)]; }
  Edge operator()(const Edge& e) const { return Edge((*this)(e.u), (*this)(e.v)); }
  const std::vector<Node>& forward() const { return forward_; }

  Matching inverse() const;
  /// (this o inner)(v) = this(inner(v)).
  Matching compose(const Matching& inner) const;

  /// True if every node stays inside its community.
  bool preserves(std::span<const int> community_of) const;

  auto operator<=>(const Matching&) const = default;

 private:
  std::vector<Node> forward_;
};

/// Throws unless `pi` is a community-preserving bijection for `community_of`.
void require_in_pi(const Matching& pi, std::span<const int> community_of);

/// Product over communities of n_i!, saturating at +infinity.
double pi_cardinality(std::span<const int> community_sizes);

/// Visits every community-preserving permutation in lexicographic order of
/// the forward sequence. Return false from `visit` to stop early.
void for_each_matching(std::span<const int> community_of,
                       const std::function<bool(const Matching&)>& visit);

/// Keeps each edge independently with probability s.
CommunityGraph sample_edges(const CommunityGraph& g, double s, std::uint64_t seed);

/// Uniform draw from the community-preserving permutations of `params`.
Matching random_matching(const ModelParams& params, std::uint64_t seed);

/// Relabels `g` through `pi`: edge (u, v) becomes (pi(u), pi(v)).
CommunityGraph apply_matching(const CommunityGraph& g, const Matching& pi);

struct InstanceSeeds {
  std::uint64_t master = 0;
  std::uint64_t graph = 0;
  std::uint64_t sample1 = 0;
  std::uint64_t sample2 = 0;
  std::uint64_t permutation = 0;

  bool operator==(const InstanceSeeds&) const = default;
};

/// Ground truth g, public sample g1, anonymized sample g2 (relabeled by the
/// hidden matching `truth`, so g1 node v is g2 node truth(v)).
struct DeanonInstance {
  ModelParams params;
  CommunityGraph g;
  CommunityGraph g1;
  CommunityGraph g2;
  Matching truth;
  InstanceSeeds seeds;

  bool operator==(const DeanonInstance&) const = default;
};

struct InstanceOptions {
  /// Skip the anonymizing shuffle; truth is the identity.
  bool identity_truth = false;
};

/// One master seed splits into independent graph / sample / permutation streams.
InstanceSeeds split_seeds(std::uint64_t master);

DeanonInstance make_instance(const ModelParams& params, std::uint64_t seed,
                             InstanceOptions options = {});

}  // namespace deanon
