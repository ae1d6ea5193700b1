#include <cmath>
#include <string>

#include "doctest.h"
#include "deanon/graph_model.hpp"
#include "deanon/random.hpp"

using namespace deanon;

TEST_CASE("validate_params strict and generation-only") {
  const ModelParams ok = ModelParams::single_community(5, 0.3, 0.5);
  CHECK_NOTHROW(validate_params(ok, ValidationMode::kStrict));

  const ModelParams high = ModelParams::single_community(5, 0.6, 0.5);
  try {
    validate_params(high, ValidationMode::kStrict);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("p11") != std::string::npos);
  }
  CHECK_NOTHROW(validate_params(high, ValidationMode::kGenerationOnly));

  const ModelParams full = ModelParams::two_community(3, 2, 0.2, 1.0, 0.5);
  CHECK_NOTHROW(validate_params(full, ValidationMode::kGenerationOnly));
  CHECK_THROWS_AS(validate_params(full, ValidationMode::kStrict), ValidationError);

  SUBCASE("bad shapes and ranges") {
    ModelParams p = ok;
    p.sample_prob = 0.0;
    CHECK_THROWS_AS(validate_params(p, ValidationMode::kGenerationOnly), ValidationError);
    p.sample_prob = 1.0;
    CHECK_NOTHROW(validate_params(p, ValidationMode::kStrict));
    p.sizes = {0};
    CHECK_THROWS_AS(validate_params(p, ValidationMode::kGenerationOnly), ValidationError);

    ModelParams asym{{2, 2}, {0.1, 0.2, 0.3, 0.1}, 0.5};
    CHECK_THROWS_AS(validate_params(asym, ValidationMode::kGenerationOnly), ValidationError);
    ModelParams neg{{2}, {-0.1}, 0.5};
    CHECK_THROWS_AS(validate_params(neg, ValidationMode::kGenerationOnly), ValidationError);
    ModelParams zero{{2}, {0.0}, 0.5};
    CHECK_NOTHROW(validate_params(zero, ValidationMode::kGenerationOnly));
    CHECK_THROWS_AS(validate_params(zero, ValidationMode::kStrict), ValidationError);
  }
}

TEST_CASE("block_pair_count") {
  const ModelParams params = ModelParams::two_community(3, 2, 0.1, 0.1, 0.5);
  CHECK(block_pair_count(params, {0, 0}) == 3);
  CHECK(block_pair_count(params, {0, 1}) == 6);
  CHECK(block_pair_count(params, {1, 1}) == 1);
  CHECK_THROWS_AS(block_pair_count(params, {0, 2}), ValidationError);
}

TEST_CASE("block pair counts add up to all pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(5));
    ModelParams params;
    for (int i = 0; i < k; ++i) params.sizes.push_back(1 + static_cast<int>(rng.below(30)));
    params.edge_prob.assign(static_cast<std::size_t>(k * k), 0.1);
    std::int64_t total = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) total += block_pair_count(params, {i, j});
    }
    const std::int64_t n = params.n();
    CHECK(total == n * (n - 1) / 2);
  }
}

TEST_CASE("block_of") {
  const CommunityGraph g(contiguous_communities(std::vector<int>{2, 3}), {});
  CHECK(g.block_of(0, 3) == BlockIndex(0, 1));
  CHECK(g.block_of(4, 1) == BlockIndex(0, 1));
  CHECK(g.block_of(2, 4) == BlockIndex(1, 1));
  CHECK_THROWS_AS(g.block_of(2, 2), ValidationError);
}

TEST_CASE("CommunityGraph canonicalizes edges") {
  const CommunityGraph g({0, 0, 0}, {{2, 0}, {0, 2}, {1, 2}});
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0] == Edge(0, 2));
  CHECK(g.edges()[1] == Edge(1, 2));
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK(g.degree(2) == 2);
  CHECK_THROWS_AS(CommunityGraph({0, 0}, {{1, 1}}), ValidationError);
  CHECK_THROWS_AS(CommunityGraph({0, 0}, {{0, 2}}), ValidationError);
}

TEST_CASE("generate_sbm degenerate probabilities") {
  const ModelParams empty{{3, 4}, {0, 0, 0, 0}, 1.0};
  CHECK(generate_sbm(empty, 1).edge_count() == 0);
  const ModelParams full{{3, 4}, {1, 1, 1, 1}, 1.0};
  CHECK(generate_sbm(full, 1).edge_count() == 21);
}

TEST_CASE("generate_sbm is a pure function of params and seed") {
  const ModelParams params = ModelParams::two_community(10, 12, 0.3, 0.1, 0.5);
  CHECK(generate_sbm(params, 99) == generate_sbm(params, 99));
  CHECK_FALSE(generate_sbm(params, 99) == generate_sbm(params, 100));
}

TEST_CASE("generate_sbm edge count concentrates around N p") {
  const ModelParams params = ModelParams::single_community(2000, 0.01, 1.0);
  const double pairs = 2000.0 * 1999.0 / 2.0;
  const double mean = pairs * 0.01;
  const double sigma = std::sqrt(pairs * 0.01 * 0.99);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double edges = static_cast<double>(generate_sbm(params, seed).edge_count());
    CHECK(std::abs(edges - mean) < 5 * sigma);
  }
}

TEST_CASE("per-block edge counts average to N^{ij} p_ij") {
  const ModelParams params{{30, 20}, {0.2, 0.05, 0.05, 0.4}, 1.0};
  const int seeds = 200;
  double sums[3] = {0, 0, 0};
  for (int seed = 0; seed < seeds; ++seed) {
    const auto counts = generate_sbm(params, static_cast<std::uint64_t>(seed)).block_edge_counts();
    sums[0] += static_cast<double>(counts[0]);
    sums[1] += static_cast<double>(counts[1]);
    sums[2] += static_cast<double>(counts[3]);
  }
  const BlockIndex blocks[3] = {{0, 0}, {0, 1}, {1, 1}};
  for (int b = 0; b < 3; ++b) {
    const double n_pairs = static_cast<double>(block_pair_count(params, blocks[b]));
    const double p = params.p(blocks[b].i, blocks[b].j);
    const double mean = sums[b] / seeds;
    const double se = std::sqrt(n_pairs * p * (1 - p) / seeds);
    CHECK(std::abs(mean - n_pairs * p) < 5 * se);
  }
}
