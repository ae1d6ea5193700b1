#include "deanon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>

#include "deanon/random.hpp"

namespace deanon {

MismatchSets mismatch_sets(const Matching& pi, std::span<const int> community_sizes) {
  const std::vector<int> community_of = contiguous_communities(community_sizes);
  require_in_pi(pi, community_of);
  const int n = pi.n();
  const auto k = community_sizes.size();

  MismatchSets out;
  out.moved.assign(k, 0);
  for (Node v = 0; v < n; ++v) {
    if (pi(v) != v) ++out.moved[static_cast<std::size_t>(community_of[static_cast<std::size_t>(v)])];
  }
  for (Node u = 0; u < n; ++u) {
    const Node pu = pi(u);
    for (Node v = u + 1; v < n; ++v) {
      if (pu == v && pi(v) == u) {
        out.transpositions.emplace_back(u, v);
        continue;
      }
      if (pu == u && pi(v) == v) continue;
      if (community_of[static_cast<std::size_t>(u)] == community_of[static_cast<std::size_t>(v)]) {
        out.intra.emplace_back(u, v);
      } else {
        out.inter.emplace_back(u, v);
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t ki = out.moved[i];
    const std::int64_t ni = community_sizes[i];
    out.intra_closed_form += ki * (ki - 1) / 2 + ki * (ni - ki);
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::int64_t kj = out.moved[j];
      const std::int64_t nj = community_sizes[j];
      out.inter_closed_form += ki * nj + kj * ni - ki * kj;
    }
  }
  out.intra_closed_form -= static_cast<std::int64_t>(out.transpositions.size());
  return out;
}

EventProbs event_probs(double p, double q, double s) {
  auto in_unit = [](double x) { return !std::isnan(x) && x >= 0.0 && x <= 1.0; };
  if (!in_unit(p) || !in_unit(q)) throw ValidationError("p and q must lie in [0, 1]");
  if (std::isnan(s) || !(s > 0.0 && s <= 1.0)) throw ValidationError("s must lie in (0, 1]");
  EventProbs e;
  e.u1 = p * s * (1.0 - s);
  e.u3 = p * s * (s + 1.0 - 2.0 * p * s);
  e.u2 = 1.0 - e.u1 - e.u3;
  e.v1 = q * s * (1.0 - s);
  e.v3 = q * s * (s + 1.0 - 2.0 * q * s);
  e.v2 = 1.0 - e.v1 - e.v3;
  return e;
}

PartitionResult partition_pairs(const Matching& pi, std::span<const Edge> pairs) {
  const auto n = static_cast<std::uint64_t>(pi.n());
  auto key = [n](const Edge& e) { return static_cast<std::uint64_t>(e.u) * n + static_cast<std::uint64_t>(e.v); };

  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(pairs.size() * 2);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Edge& e = pairs[i];
    if (e.u < 0 || e.v >= pi.n() || e.u == e.v) throw ValidationError("pair outside the node range");
    if (!index.emplace(key(e), i).second) throw ValidationError("duplicate pair in partition input");
  }

  // D^pi restricted to the input: out- and in-degree at most one, so it is a
  // union of simple paths and cycles.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> next(pairs.size(), kNone);
  std::vector<std::size_t> prev(pairs.size(), kNone);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Edge image = pi(pairs[i]);
    if (image == pairs[i]) {
      throw ValidationError("pair (" + std::to_string(image.u) + "," + std::to_string(image.v) +
                            ") is fixed by the matching");
    }
    if (auto it = index.find(key(image)); it != index.end()) {
      next[i] = it->second;
      prev[it->second] = i;
    }
  }

  PartitionResult result;
  std::vector<char> visited(pairs.size(), 0);
  std::vector<std::size_t> component;

  auto place = [&](bool cycle) {
    const std::size_t len = component.size();
    std::vector<int> pattern(len);
    for (std::size_t j = 0; j < len; ++j) pattern[j] = static_cast<int>(j % 3);
    if (cycle && len % 3 == 1) pattern[len - 1] = 1;

    std::array<std::size_t, 3> count{};
    for (int c : pattern) ++count[static_cast<std::size_t>(c)];
    // Heaviest pattern color goes to the currently lightest part.
    std::array<int, 3> by_count{0, 1, 2};
    std::stable_sort(by_count.begin(), by_count.end(),
                     [&](int a, int b) { return count[static_cast<std::size_t>(a)] > count[static_cast<std::size_t>(b)]; });
    std::array<int, 3> by_size{0, 1, 2};
    std::stable_sort(by_size.begin(), by_size.end(), [&](int a, int b) {
      return result.parts[static_cast<std::size_t>(a)].size() < result.parts[static_cast<std::size_t>(b)].size();
    });
    std::array<int, 3> target{};
    for (std::size_t r = 0; r < 3; ++r) target[static_cast<std::size_t>(by_count[r])] = by_size[r];
    for (std::size_t j = 0; j < len; ++j) {
      result.parts[static_cast<std::size_t>(target[static_cast<std::size_t>(pattern[j])])].push_back(pairs[component[j]]);
    }
  };

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (prev[i] != kNone) continue;
    component.clear();
    for (std::size_t cur = i; cur != kNone; cur = next[cur]) {
      visited[cur] = 1;
      component.push_back(cur);
    }
    place(false);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (visited[i]) continue;
    component.clear();
    std::size_t cur = i;
    do {
      visited[cur] = 1;
      component.push_back(cur);
      cur = next[cur];
    } while (cur != i);
    place(true);
  }

  for (std::size_t c = 0; c < 3; ++c) result.sizes[c] = result.parts[c].size();
  return result;
}

double chernoff_bound(std::int64_t n_z, std::int64_t n_t, const EventProbs& probs) {
  if (n_z < 0 || n_t < 0) throw ValidationError("part sizes must be nonnegative");
  const double down = static_cast<double>(n_z) * probs.u3 + static_cast<double>(n_t) * probs.v3;
  const double up = static_cast<double>(n_z) * probs.u1 + static_cast<double>(n_t) * probs.v1;
  if (down <= up) return 1.0;
  const double gap = std::sqrt(down) - std::sqrt(up);
  return std::min(1.0, std::exp(-gap * gap));
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DEANON_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Sum of `count` i.i.d. steps that are +1 w.p. up, -1 w.p. down.
std::int64_t draw_walk(std::mt19937_64& rng, std::int64_t count, double up, double down) {
  if (count == 0) return 0;
  std::binomial_distribution<std::int64_t> ups(count, std::clamp(up, 0.0, 1.0));
  const std::int64_t n_up = ups(rng);
  const double rest = 1.0 - up;
  const double down_given_not_up = rest > 0.0 ? std::clamp(down / rest, 0.0, 1.0) : 0.0;
  std::binomial_distribution<std::int64_t> downs(count - n_up, down_given_not_up);
  return n_up - downs(rng);
}

}  // namespace

TailEstimate empirical_tail(std::int64_t n_z, std::int64_t n_t, const EventProbs& probs,
                            std::uint64_t trials, std::uint64_t seed, int threads) {
  if (trials == 0) throw ValidationError("empirical_tail needs at least one trial");
  if (n_z < 0 || n_t < 0) throw ValidationError("part sizes must be nonnegative");

  constexpr std::uint64_t kChunks = 64;
  std::vector<std::uint64_t> hits(kChunks, 0);
  auto run_chunk = [&](std::uint64_t chunk) {
    const std::uint64_t begin = trials * chunk / kChunks;
    const std::uint64_t end = trials * (chunk + 1) / kChunks;
    std::mt19937_64 rng(derive_seed(seed, chunk));
    std::uint64_t local = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      const std::int64_t z = draw_walk(rng, n_z, probs.u1, probs.u3);
      const std::int64_t tt = draw_walk(rng, n_t, probs.v1, probs.v3);
      if (z + tt >= 0) ++local;
    }
    hits[chunk] = local;
  };

  const int workers = std::min<int>(resolve_threads(threads), static_cast<int>(kChunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < kChunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (auto c = static_cast<std::uint64_t>(w); c < kChunks; c += static_cast<std::uint64_t>(workers)) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }

  TailEstimate out;
  out.trials = trials;
  out.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.half_width = 2.5758293035489004 * std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

SymmetricModel symmetric_model(const ModelParams& params) {
  validate_params(params, ValidationMode::kGenerationOnly);
  if (params.k() == 1) return SymmetricModel{params.sizes[0], 0, params.p(0, 0), 0.0, params.sample_prob};
  if (params.k() != 2) throw ValidationError("threshold analysis covers k <= 2 communities only");
  if (params.p(0, 0) != params.p(1, 1)) {
    throw ValidationError("threshold analysis needs p11 == p22");
  }
  return SymmetricModel{params.sizes[0], params.sizes[1], params.p(0, 0), params.p(0, 1),
                        params.sample_prob};
}

double sampling_factor(double s) { return s * (1.0 - std::sqrt(1.0 - s * s)); }

namespace {

// log(sum_{j=0}^{m} e^{j a}).
double log_geometric(int m, double a) {
  if (m == 0) return 0.0;
  if (a == 0.0) return std::log(static_cast<double>(m) + 1.0);
  if (a < 0.0) return std::log(-std::expm1((m + 1.0) * a)) - std::log(-std::expm1(a));
  return m * a + std::log(-std::expm1(-(m + 1.0) * a)) - std::log(-std::expm1(-a));
}

double log_sum_exp(const std::vector<double>& xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

void check_model(const SymmetricModel& m) {
  if (m.n1 < 1 || m.n2 < 0) throw ValidationError("community sizes must be positive");
  if (!(m.p >= 0.0 && m.p <= 1.0) || !(m.q >= 0.0 && m.q <= 1.0)) {
    throw ValidationError("p and q must lie in [0, 1]");
  }
  if (!(m.s > 0.0 && m.s <= 1.0)) throw ValidationError("s must lie in (0, 1]");
}

}  // namespace

ExpectedSBound expected_s_bound(const SymmetricModel& model, bool include_terms) {
  check_model(model);
  const double f = sampling_factor(model.s);
  ExpectedSBound out;
  out.a1 = std::log(static_cast<double>(model.n1)) - f * (model.n1 * model.p + model.n2 * model.q) / 3.0;
  out.a2 = model.n2 > 0
               ? std::log(static_cast<double>(model.n2)) - f * (model.n2 * model.p + model.n1 * model.q) / 3.0
               : 0.0;
  const double log3 = std::log(3.0);

  if (include_terms) {
    std::vector<double> logs;
    for (int k1 = 0; k1 <= model.n1; ++k1) {
      for (int k2 = 0; k2 <= model.n2; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        const double lt = log3 + k1 * out.a1 + k2 * out.a2;
        out.terms.push_back({k1, k2, lt});
        logs.push_back(lt);
      }
    }
    out.log_total = log_sum_exp(logs);
  } else {
    // 3 (G1 G2 - 1) with G_i the geometric sums over k_i.
    const double l = log_geometric(model.n1, out.a1) + log_geometric(model.n2, out.a2);
    out.log_total = log3 + l + std::log(-std::expm1(-l));
  }
  out.total = std::exp(out.log_total);
  out.below_one = out.log_total < 0.0;
  return out;
}

ThresholdReport threshold_report(const SymmetricModel& model) {
  check_model(model);
  const double f = sampling_factor(model.s);
  ThresholdReport report;
  report.q_exceeds_p = model.q > model.p;

  auto make = [&](int n_this, int n_other, double q) {
    CommunityThreshold t;
    const double ratio = n_other > 0 ? static_cast<double>(n_other) / n_this : 0.0;
    t.lhs_c1 = f * (model.p + ratio * q);
    t.lhs_c2 = f * (model.p + 2.0 * ratio * q);
    t.rhs = 3.0 * std::log(static_cast<double>(n_this)) / n_this;
    t.slack_c1 = t.lhs_c1 - t.rhs;
    t.slack_c2 = t.lhs_c2 - t.rhs;
    t.satisfied_c1 = t.slack_c1 > 0.0;
    t.satisfied_c2 = t.slack_c2 > 0.0;
    return t;
  };

  report.communities.push_back(make(model.n1, model.n2, model.q));
  if (model.n2 > 0) report.communities.push_back(make(model.n2, model.n1, model.q));
  if (model.n2 == 0 || (model.q == 0.0 && model.n1 == model.n2)) {
    report.single_community = make(model.n1, 0, 0.0);
  }
  return report;
}

ThresholdReport threshold_report(const ModelParams& params) {
  return threshold_report(symmetric_model(params));
}

std::vector<Matching> automorphism_check(const CommunityGraph& g, double budget) {
  const double size = pi_cardinality(g.community_sizes());
  if (size > budget) {
    throw BudgetExceeded("automorphism enumeration over " + std::to_string(size) +
                         " matchings exceeds budget " + std::to_string(budget));
  }
  const int n = g.n();
  std::vector<Node> forward(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<Matching> out;

  // Placing nodes in label order with ascending candidates keeps the output
  // lexicographically sorted.
  std::function<void(Node)> place = [&](Node v) {
    if (v == n) {
      out.emplace_back(forward);
      return;
    }
    for (Node t = 0; t < n; ++t) {
      if (used[static_cast<std::size_t>(t)] || g.community(t) != g.community(v) || g.degree(t) != g.degree(v)) {
        continue;
      }
      bool ok = true;
      for (Node w = 0; w < v && ok; ++w) ok = g.has_edge(v, w) == g.has_edge(t, forward[static_cast<std::size_t>(w)]);
      if (!ok) continue;
      used[static_cast<std::size_t>(t)] = 1;
      forward[static_cast<std::size_t>(v)] = t;
      place(v + 1);
      used[static_cast<std::size_t>(t)] = 0;
    }
  };
  place(0);
  return out;
}

}  // namespace deanon
