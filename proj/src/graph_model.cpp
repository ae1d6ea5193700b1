#include "deanon/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "deanon/random.hpp"

namespace deanon {

namespace {

std::string block_name(int i, int j) {
  return "p" + std::to_string(i + 1) + std::to_string(j + 1);
}

}  // namespace

int ModelParams::n() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

ModelParams ModelParams::two_community(int n1, int n2, double p, double q, double s) {
  return ModelParams{{n1, n2}, {p, q, q, p}, s};
}

ModelParams ModelParams::single_community(int n, double p, double s) {
  return ModelParams{{n}, {p}, s};
}

ModelParams validate_params(const ModelParams& params, ValidationMode mode) {
  const int k = params.k();
  if (k < 1) throw ValidationError("model needs at least one community");
  for (int i = 0; i < k; ++i) {
    if (params.sizes[static_cast<std::size_t>(i)] < 1) {
      throw ValidationError("size n" + std::to_string(i + 1) + " must be >= 1");
    }
  }
  if (params.edge_prob.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
    throw ValidationError("edge_prob must be a " + std::to_string(k) + "x" + std::to_string(k) +
                          " matrix");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double pij = params.p(i, j);
      if (std::isnan(pij) || pij < 0.0 || pij > 1.0) {
        std::ostringstream msg;
        msg << block_name(i, j) << " = " << pij << " outside [0, 1]";
        throw ValidationError(msg.str());
      }
      if (pij != params.p(j, i)) {
        throw ValidationError("edge_prob not symmetric: " + block_name(i, j) + " != " +
                              block_name(j, i));
      }
      if (mode == ValidationMode::kStrict && !(pij > 0.0 && pij < 0.5)) {
        std::ostringstream msg;
        msg << block_name(i, j) << " = " << pij << " outside (0, 1/2)";
        throw ValidationError(msg.str());
      }
    }
  }
  const double s = params.sample_prob;
  if (std::isnan(s) || !(s > 0.0 && s <= 1.0)) {
    std::ostringstream msg;
    msg << "sample probability s = " << s << " outside (0, 1]";
    throw ValidationError(msg.str());
  }
  return params;
}

std::vector<int> contiguous_communities(std::span<const int> sizes) {
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
  }
  return labels;
}

std::int64_t block_pair_count(const ModelParams& params, BlockIndex block) {
  if (block.i < 0 || block.j >= params.k()) {
    throw ValidationError("block (" + std::to_string(block.i + 1) + "," +
                          std::to_string(block.j + 1) + ") outside 1.." +
                          std::to_string(params.k()));
  }
  const std::int64_t ni = params.sizes[static_cast<std::size_t>(block.i)];
  const std::int64_t nj = params.sizes[static_cast<std::size_t>(block.j)];
  return block.i == block.j ? ni * (ni - 1) / 2 : ni * nj;
}

CommunityGraph::CommunityGraph(std::vector<int> community_of, std::vector<Edge> edges)
    : community_of_(std::move(community_of)), edges_(std::move(edges)) {
  const int n = static_cast<int>(community_of_.size());
  for (int c : community_of_) {
    if (c < 0) throw ValidationError("negative community label");
    k_ = std::max(k_, c + 1);
  }
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.v >= n) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") outside node range 0.." + std::to_string(n - 1));
    }
    if (e.u == e.v) throw ValidationError("self-loop at node " + std::to_string(e.u));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  words_ = (static_cast<std::size_t>(n) + 63) / 64;
  bits_.assign(words_ * static_cast<std::size_t>(n), 0);
  degree_.assign(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges_) {
    bits_[static_cast<std::size_t>(e.u) * words_ + (static_cast<std::size_t>(e.v) >> 6)] |=
        std::uint64_t{1} << (e.v & 63);
    bits_[static_cast<std::size_t>(e.v) * words_ + (static_cast<std::size_t>(e.u) >> 6)] |=
        std::uint64_t{1} << (e.u & 63);
    ++degree_[static_cast<std::size_t>(e.u)];
    ++degree_[static_cast<std::size_t>(e.v)];
  }
}

BlockIndex CommunityGraph::block_of(Node a, Node b) const {
  if (a == b) throw ValidationError("self-pair (" + std::to_string(a) + "," + std::to_string(a) + ")");
  if (a < 0 || b < 0 || a >= n() || b >= n()) throw ValidationError("node outside graph");
  return BlockIndex(community(a), community(b));
}

std::vector<std::int64_t> CommunityGraph::block_edge_counts() const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k_ * k_), 0);
  for (const Edge& e : edges_) {
    const int a = community(e.u);
    const int b = community(e.v);
    ++counts[static_cast<std::size_t>(a * k_ + b)];
    if (a != b) ++counts[static_cast<std::size_t>(b * k_ + a)];
  }
  return counts;
}

std::vector<int> CommunityGraph::community_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k_), 0);
  for (int c : community_of_) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

CommunityGraph generate_sbm(const ModelParams& params, std::uint64_t seed) {
  validate_params(params, ValidationMode::kGenerationOnly);
  std::vector<int> labels = contiguous_communities(params.sizes);
  const int n = static_cast<int>(labels.size());
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Node u = 0; u < n; ++u) {
    for (Node v = u + 1; v < n; ++v) {
      if (rng.bernoulli(params.p(labels[static_cast<std::size_t>(u)], labels[static_cast<std::size_t>(v)]))) {
        edges.emplace_back(u, v);
      }
    }
  }
  return CommunityGraph(std::move(labels), std::move(edges));
}

void require_same_layout(const CommunityGraph& a, const CommunityGraph& b) {
  if (a.community_of() != b.community_of()) {
    throw ValidationError("graphs differ in node count or community labels");
  }
}

}  // namespace deanon
