#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deanon/graph_model.hpp"
#include "deanon/sampler.hpp"

namespace deanon {

/// Node pairs moved by a matching, split by community structure.
struct MismatchSets {
  /// Pairs inside one community with pi(e) != e.
  std::vector<Edge> intra;
  /// Pairs across communities with pi(e) != e.
  std::vector<Edge> inter;
  /// Pairs {a, b} with pi(a) = b and pi(b) = a.
  std::vector<Edge> transpositions;
  /// Moved nodes per community (k_i).
  std::vector<int> moved;

  /// sum_i [C(k_i, 2) + k_i (n_i - k_i)] - |transpositions|.
  std::int64_t intra_closed_form = 0;
  /// sum_{i<j} [k_i n_j + k_j n_i - k_i k_j].
  std::int64_t inter_closed_form = 0;
};

MismatchSets mismatch_sets(const Matching& pi, std::span<const int> community_sizes);

/// Distribution of the per-pair cost difference for intra (u) and inter (v)
/// pairs: index 0 is Pr{+1}, 1 is Pr{0}, 2 is Pr{-1}.
struct EventProbs {
  double u1 = 0, u2 = 1, u3 = 0;
  double v1 = 0, v2 = 1, v3 = 0;
};

EventProbs event_probs(double p, double q, double s);

/// Three disjoint parts covering the input pairs; no part contains both a
/// pair and its image under pi.
struct PartitionResult {
  std::array<std::vector<Edge>, 3> parts;
  std::array<std::size_t, 3> sizes{};
};

/// Colors the pair dependency graph (e -- pi(e)) with three colors so that
/// every part is pi-image-disjoint and all parts are within one element of
/// each other in size. Throws on a pair fixed by pi.
PartitionResult partition_pairs(const Matching& pi, std::span<const Edge> pairs);

/// exp(-(sqrt(nZ u3 + nT v3) - sqrt(nZ u1 + nT v1))^2): the optimized
/// Chernoff bound on Pr{Z + T >= 0}. Returns 1 when the negative-step mass
/// does not exceed the positive-step mass (optimal tilt at zero).
double chernoff_bound(std::int64_t n_z, std::int64_t n_t, const EventProbs& probs);

struct TailEstimate {
  double estimate = 0.0;
  /// 99% normal-approximation half-width.
  double half_width = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

/// Monte Carlo estimate of Pr{Z + T >= 0} with Z a sum of n_z i.i.d. intra
/// steps and T a sum of n_t i.i.d. inter steps. Work is split into fixed
/// seeded chunks so the result does not depend on the thread count.
TailEstimate empirical_tail(std::int64_t n_z, std::int64_t n_t, const EventProbs& probs,
                            std::uint64_t trials, std::uint64_t seed, int threads = 0);

/// Two-community (or single-community, q = 0) parameterization used by the
/// threshold analysis.
struct SymmetricModel {
  int n1 = 0;
  int n2 = 0;  // 0 for a single community
  double p = 0;
  double q = 0;
  double s = 1;
};

/// Extracts (n1, n2, p, q, s); requires k <= 2 and p11 == p22.
SymmetricModel symmetric_model(const ModelParams& params);

struct ExpectedSTerm {
  int k1 = 0;
  int k2 = 0;
  double log_term = 0.0;
};

struct ExpectedSBound {
  /// log of 3 * exp(k1 a1 + k2 a2), one row per (k1, k2) != (0, 0).
  std::vector<ExpectedSTerm> terms;
  /// Per-unit exponents a_i = log n_i - s (1 - sqrt(1 - s^2)) (n_i p + n_j q) / 3.
  double a1 = 0.0;
  double a2 = 0.0;
  double log_total = 0.0;
  double total = 0.0;
  bool below_one = false;
};

/// Union bound on the expected number of wrong matchings that cost no more
/// than the truth under the unit-weight cost.
ExpectedSBound expected_s_bound(const SymmetricModel& model, bool include_terms = true);

struct CommunityThreshold {
  /// s (1 - sqrt(1 - s^2)) (p + c (n_other / n_this) q) for c = 1 and c = 2.
  double lhs_c1 = 0.0;
  double lhs_c2 = 0.0;
  /// 3 log(n_this) / n_this.
  double rhs = 0.0;
  double slack_c1 = 0.0;
  double slack_c2 = 0.0;
  bool satisfied_c1 = false;
  bool satisfied_c2 = false;
};

struct ThresholdReport {
  std::vector<CommunityThreshold> communities;
  /// q > p: outside the hypothesis of the two-community result.
  bool q_exceeds_p = false;
  /// Single-community reduction p s (1 - sqrt(1 - s^2)) vs 3 log n / n, when
  /// q = 0 and n1 = n2 (or k = 1).
  std::optional<CommunityThreshold> single_community;
};

/// s (1 - sqrt(1 - s^2)).
double sampling_factor(double s);

ThresholdReport threshold_report(const ModelParams& params);
ThresholdReport threshold_report(const SymmetricModel& model);

/// Every community-preserving automorphism of g, lexicographically sorted.
std::vector<Matching> automorphism_check(const CommunityGraph& g, double budget = 1e8);

}  // namespace deanon
