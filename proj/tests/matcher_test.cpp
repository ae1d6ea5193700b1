#include <algorithm>
#include <set>

#include "doctest.h"
#include "deanon/cost.hpp"
#include "deanon/matcher.hpp"
#include "deanon/sampler.hpp"

using namespace deanon;

namespace {

std::vector<Matching> all_matchings(std::span<const int> community_of) {
  std::vector<Matching> out;
  for_each_matching(community_of, [&](const Matching& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

void check_same(const MatchResult& a, const MatchResult& b) {
  CHECK(a.best == b.best);
  CHECK(a.best_cost.weighted == b.best_cost.weighted);
  CHECK(a.tie_set == b.tie_set);
  CHECK(a.tie_count == b.tie_count);
}

}  // namespace

TEST_CASE("exact_match on an empty graph ties everything") {
  const CommunityGraph g({0, 0, 1, 1, 1}, {});
  const MatchResult r = exact_match(g, g, WeightTable::unit(2));
  CHECK(r.tie_set == all_matchings(g.community_of()));
  CHECK(r.tie_count == 12);
  CHECK(r.best == Matching::identity(5));
  CHECK(r.best_cost.weighted_total() == 0);
}

TEST_CASE("exact_match on a path returns its automorphisms") {
  const CommunityGraph path({0, 0, 0}, {{0, 1}, {1, 2}});
  const MatchResult r = exact_match(path, path, WeightTable::unit(1));
  REQUIRE(r.tie_set.size() == 2);
  CHECK(r.tie_set[0] == Matching::identity(3));
  CHECK(r.tie_set[1] == Matching({2, 1, 0}));
  CHECK(r.best_cost.unweighted_total == 0);
}

TEST_CASE("exact_match agrees with enumeration") {
  SUBCASE("n1 = n2 = 4") {
    const ModelParams params = ModelParams::two_community(4, 4, 0.4, 0.2, 0.5);
    const WeightTable w = compute_weights(params);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DeanonInstance inst = make_instance(params, seed);
      const MatchResult exact = exact_match(inst.g1, inst.g2, w);
      ExtendedCost min{std::numeric_limits<std::int64_t>::max(), 0.0};
      for (const Matching& m : all_matchings(inst.g1.community_of())) {
        min = std::min(min, delta(inst.g1, inst.g2, m, w).weighted);
      }
      CHECK(exact.best_cost.weighted == min);
      check_same(exact, brute_force_match(inst.g1, inst.g2, w));
    }
  }
  SUBCASE("mixed layouts up to n = 7") {
    const std::vector<std::vector<int>> layouts{{7}, {3, 4}, {2, 2, 3}, {1, 6}, {5, 1, 1}};
    for (const auto& sizes : layouts) {
      ModelParams params;
      params.sizes = sizes;
      const int k = static_cast<int>(sizes.size());
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) params.edge_prob.push_back(i == j ? 0.4 : 0.15);
      params.sample_prob = 0.7;
      const WeightTable w = compute_weights(params);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const DeanonInstance inst = make_instance(params, seed);
        check_same(exact_match(inst.g1, inst.g2, w), brute_force_match(inst.g1, inst.g2, w));
        check_same(exact_match(inst.g1, inst.g2, WeightTable::unit(k)),
                   brute_force_match(inst.g1, inst.g2, WeightTable::unit(k)));
      }
    }
  }
  SUBCASE("s = 1 uses infinite weights") {
    const ModelParams params = ModelParams::two_community(3, 3, 0.4, 0.2, 1.0);
    const WeightTable w = compute_weights(params);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DeanonInstance inst = make_instance(params, seed);
      const MatchResult r = exact_match(inst.g1, inst.g2, w);
      CHECK(r.best_cost.weighted_total() == 0);
      CHECK(std::binary_search(r.tie_set.begin(), r.tie_set.end(), inst.truth));
      check_same(r, brute_force_match(inst.g1, inst.g2, w));
    }
  }
}

TEST_CASE("exact_match options") {
  const ModelParams params = ModelParams::single_community(6, 0.3, 0.5);
  const DeanonInstance inst = make_instance(params, 3);
  const WeightTable w = compute_weights(params);
  CHECK_THROWS_AS(exact_match(inst.g1, inst.g2, w, {.budget = 100}), BudgetExceeded);
  CHECK_NOTHROW(exact_match(inst.g1, inst.g2, w, {.budget = 100, .ignore_budget = true}));

  const CommunityGraph empty(std::vector<int>(5, 0), {});
  const MatchResult r = exact_match(empty, empty, WeightTable::unit(1), {.tie_limit = 10});
  CHECK(r.tie_count == 120);
  CHECK(r.tie_set.size() == 10);
  CHECK(r.tie_set_truncated);
  CHECK(r.best == Matching::identity(5));
}

TEST_CASE("relabeling g2 translates the cost landscape") {
  const ModelParams params = ModelParams::two_community(4, 3, 0.4, 0.1, 0.6);
  const WeightTable w = compute_weights(params);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DeanonInstance inst = make_instance(params, seed);
    const Matching sigma = random_matching(params, seed + 77);
    const MatchResult base = exact_match(inst.g1, inst.g2, w);
    const MatchResult moved = exact_match(inst.g1, apply_matching(inst.g2, sigma), w);
    CHECK(moved.best_cost.weighted == base.best_cost.weighted);
    std::vector<Matching> expected;
    for (const Matching& m : base.tie_set) expected.push_back(sigma.compose(m));
    std::sort(expected.begin(), expected.end());
    CHECK(moved.tie_set == expected);
  }
}

TEST_CASE("local search") {
  const ModelParams params = ModelParams::two_community(5, 5, 0.4, 0.1, 0.8);
  const WeightTable w = compute_weights(params);

  SUBCASE("a global optimum is a fixed point") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DeanonInstance inst = make_instance(params, seed);
      const MatchResult exact = exact_match(inst.g1, inst.g2, w);
      const MatchResult local =
          local_search_match(inst.g1, inst.g2, w, {.restarts = 1, .seed = 5, .start = exact.best});
      CHECK(local.best == exact.best);
      CHECK(local.mode == MatchMode::kLocalSearch);
    }
  }

  SUBCASE("never beats the exact optimum and is deterministic") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DeanonInstance inst = make_instance(params, seed);
      const MatchResult exact = exact_match(inst.g1, inst.g2, w);
      const MatchResult a = local_search_match(inst.g1, inst.g2, w, {.restarts = 4, .seed = seed});
      const MatchResult b = local_search_match(inst.g1, inst.g2, w, {.restarts = 4, .seed = seed});
      CHECK(a.best_cost.weighted >= exact.best_cost.weighted);
      CHECK(a.best == b.best);
      CHECK(a.best.preserves(inst.g1.community_of()));
    }
  }

  SUBCASE("larger instances stay inside the community structure") {
    const ModelParams big = ModelParams::two_community(30, 25, 0.3, 0.05, 0.9);
    const DeanonInstance inst = make_instance(big, 1);
    const MatchResult r = local_search_match(inst.g1, inst.g2, compute_weights(big), {.restarts = 2, .seed = 1});
    CHECK(r.best.preserves(inst.g1.community_of()));
    CHECK(r.best_cost.weighted <=
          delta(inst.g1, inst.g2, random_matching(big, 12345), compute_weights(big)).weighted);
  }
}

TEST_CASE("score_success") {
  const std::vector<int> community_of{0, 0, 0, 0, 1, 1, 1};
  const Matching truth({1, 2, 3, 0, 5, 6, 4});

  const SuccessReport same = score_success(truth, truth, community_of);
  CHECK(same.perfect);
  CHECK(same.fraction_correct == 1.0);

  // Differs from the truth by one transposition inside community 0.
  const Matching swapped = truth.compose(Matching({1, 0, 2, 3, 4, 5, 6}));
  const SuccessReport one = score_success(swapped, truth, community_of);
  CHECK_FALSE(one.perfect);
  CHECK(one.fraction_correct == doctest::Approx(5.0 / 7.0));
  CHECK(one.mismatch_counts == std::vector<int>{2, 0});

  // Identity against a full cycle of community 0.
  const Matching cycle({1, 2, 3, 0, 4, 5, 6});
  const SuccessReport cyc = score_success(Matching::identity(7), cycle, community_of);
  CHECK(cyc.mismatch_counts == std::vector<int>{4, 0});
  CHECK(cyc.fraction_correct == doctest::Approx(3.0 / 7.0));
}
