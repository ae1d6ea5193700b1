#include "deanon/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "deanon/random.hpp"

namespace deanon {

Matching::Matching(std::vector<Node> forward) : forward_(std::move(forward)) {
  std::vector<char> seen(forward_.size(), 0);
  for (Node v : forward_) {
    if (v < 0 || v >= n()) throw ValidationError("matching target " + std::to_string(v) + " out of range");
    if (seen[static_cast<std::size_t>(v)]) {
      throw ValidationError("matching is not a bijection: " + std::to_string(v) + " hit twice");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Matching Matching::identity(int n) {
  std::vector<Node> f(static_cast<std::size_t>(n));
  std::iota(f.begin(), f.end(), 0);
  return Matching(std::move(f));
}

Matching Matching::inverse() const {
  std::vector<Node> inv(forward_.size());
  for (std::size_t v = 0; v < forward_.size(); ++v) {
    inv[static_cast<std::size_t>(forward_[v])] = static_cast<Node>(v);
  }
  Matching m;
  m.forward_ = std::move(inv);
  return m;
}

Matching Matching::compose(const Matching& inner) const {
  if (inner.n() != n()) throw ValidationError("composing matchings of different size");
  std::vector<Node> out(forward_.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = (*this)(inner(static_cast<Node>(v)));
  Matching m;
  m.forward_ = std::move(out);
  return m;
}

bool Matching::preserves(std::span<const int> community_of) const {
  if (community_of.size() != forward_.size()) return false;
  for (std::size_t v = 0; v < forward_.size(); ++v) {
    if (community_of[v] != community_of[static_cast<std::size_t>(forward_[v])]) return false;
  }
  return true;
}

void require_in_pi(const Matching& pi, std::span<const int> community_of) {
  if (static_cast<std::size_t>(pi.n()) != community_of.size()) {
    throw ValidationError("matching has " + std::to_string(pi.n()) + " nodes, graph has " +
                          std::to_string(community_of.size()));
  }
  if (!pi.preserves(community_of)) throw ValidationError("matching is not community-preserving");
}

double pi_cardinality(std::span<const int> community_sizes) {
  double total = 1.0;
  for (int size : community_sizes) {
    total *= std::tgamma(static_cast<double>(size) + 1.0);
    if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
  }
  return total;
}

void for_each_matching(std::span<const int> community_of,
                       const std::function<bool(const Matching&)>& visit) {
  const int n = static_cast<int>(community_of.size());
  std::vector<Node> forward(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  bool stop = false;

  // Assigning positions left to right and candidates in ascending order gives
  // lexicographic order of the forward sequence.
  std::function<void(int)> assign = [&](int pos) {
    if (stop) return;
    if (pos == n) {
      if (!visit(Matching(forward))) stop = true;
      return;
    }
    for (Node t = 0; t < n && !stop; ++t) {
      if (used[static_cast<std::size_t>(t)] ||
          community_of[static_cast<std::size_t>(t)] != community_of[static_cast<std::size_t>(pos)]) {
        continue;
      }
      used[static_cast<std::size_t>(t)] = 1;
      forward[static_cast<std::size_t>(pos)] = t;
      assign(pos + 1);
      used[static_cast<std::size_t>(t)] = 0;
    }
  };
  assign(0);
}

CommunityGraph sample_edges(const CommunityGraph& g, double s, std::uint64_t seed) {
  if (std::isnan(s) || !(s > 0.0 && s <= 1.0)) {
    throw ValidationError("sample probability s must lie in (0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> kept;
  kept.reserve(static_cast<std::size_t>(static_cast<double>(g.edge_count()) * s) + 1);
  for (const Edge& e : g.edges()) {
    if (rng.bernoulli(s)) kept.push_back(e);
  }
  return CommunityGraph(g.community_of(), std::move(kept));
}

Matching random_matching(const ModelParams& params, std::uint64_t seed) {
  validate_params(params, ValidationMode::kGenerationOnly);
  Rng rng(seed);
  std::vector<Node> forward(static_cast<std::size_t>(params.n()));
  std::iota(forward.begin(), forward.end(), 0);
  std::size_t start = 0;
  for (int size : params.sizes) {
    // Fisher-Yates inside the community block.
    for (std::size_t i = static_cast<std::size_t>(size); i > 1; --i) {
      const std::size_t j = rng.below(i);
      std::swap(forward[start + i - 1], forward[start + j]);
    }
    start += static_cast<std::size_t>(size);
  }
  return Matching(std::move(forward));
}

CommunityGraph apply_matching(const CommunityGraph& g, const Matching& pi) {
  require_in_pi(pi, g.community_of());
  std::vector<Edge> image;
  image.reserve(g.edge_count());
  for (const Edge& e : g.edges()) image.push_back(pi(e));
  return CommunityGraph(g.community_of(), std::move(image));
}

InstanceSeeds split_seeds(std::uint64_t master) {
  return InstanceSeeds{master, derive_seed(master, 0), derive_seed(master, 1),
                       derive_seed(master, 2), derive_seed(master, 3)};
}

DeanonInstance make_instance(const ModelParams& params, std::uint64_t seed,
                             InstanceOptions options) {
  validate_params(params, ValidationMode::kGenerationOnly);
  const InstanceSeeds seeds = split_seeds(seed);
  CommunityGraph g = generate_sbm(params, seeds.graph);
  CommunityGraph g1 = sample_edges(g, params.sample_prob, seeds.sample1);
  const CommunityGraph h = sample_edges(g, params.sample_prob, seeds.sample2);
  Matching truth = options.identity_truth ? Matching::identity(params.n())
                                          : random_matching(params, seeds.permutation);
  CommunityGraph g2 = apply_matching(h, truth);
  return DeanonInstance{params, std::move(g), std::move(g1), std::move(g2), std::move(truth), seeds};
}

}  // namespace deanon
