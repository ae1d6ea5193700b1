// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "deanon/analysis.hpp"
#include "deanon/cost.hpp"
#include "deanon/harness.hpp"
#include "deanon/matcher.hpp"
#include "deanon/random.hpp"
#include "deanon/sampler.hpp"

using namespace deanon;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ModelParams block_params(const std::vector<int>& sizes, double p, double q, double s) {
  ModelParams params;
  params.sizes = sizes;
  const int k = static_cast<int>(sizes.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) params.edge_prob.push_back(i == j ? p : q);
  params.sample_prob = s;
  return params;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

// Random layout with total node count in [lo_n, hi_n] and at most three communities.
std::vector<int> random_sizes(Rng& rng, int lo_n, int hi_n) {
  const int n = lo_n + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi_n - lo_n + 1)));
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(3, n))));
  std::vector<int> sizes(static_cast<std::size_t>(k), 1);
  for (int extra = n - k; extra > 0; --extra) ++sizes[rng.below(static_cast<std::uint64_t>(k))];
  return sizes;
}

ModelParams random_params(Rng& rng, const std::vector<int>& sizes, double s_lo, double s_hi) {
  const int k = static_cast<int>(sizes.size());
  ModelParams params;
  params.sizes = sizes;
  params.edge_prob.assign(static_cast<std::size_t>(k * k), 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double p = uniform(rng, 0.05, 0.45);
      params.edge_prob[static_cast<std::size_t>(i * k + j)] = p;
      params.edge_prob[static_cast<std::size_t>(j * k + i)] = p;
    }
  }
  params.sample_prob = uniform(rng, s_lo, s_hi);
  return params;
}

std::vector<Matching> all_matchings(std::span<const int> community_of) {
  std::vector<Matching> out;
  for_each_matching(community_of, [&](const Matching& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// Criteria 1 and 2 share their instances.
struct PosteriorInstances {
  std::vector<std::pair<DeanonInstance, ModelParams>> items;
};

PosteriorInstances posterior_instances() {
  PosteriorInstances out;
  Rng rng(0xC0FFEE);
  for (int i = 0; i < 120; ++i) {
    const ModelParams params = random_params(rng, random_sizes(rng, 2, 5), 0.2, 0.95);
    out.items.emplace_back(make_instance(params, rng.engine()()), params);
  }
  return out;
}

Outcome map_equivalence(const PosteriorInstances& inst) {
  const auto start = Clock::now();
  int equal = 0;
  for (const auto& [instance, params] : inst.items) {
    equal += map_equivalence_check(instance.g1, instance.g2, params).equal ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  const int total = static_cast<int>(inst.items.size());
  return {equal == total && elapsed < 60.0,
          fmt("%d/%d instances with equal argmax/argmin sets, %.2f s", equal, total, elapsed)};
}

Outcome score_ratios(const PosteriorInstances& inst) {
  double worst = 0.0;
  long comparisons = 0;
  for (const auto& [instance, params] : inst.items) {
    std::vector<double> log_scores, oracle;
    for (const Matching& m : all_matchings(instance.g1.community_of())) {
      log_scores.push_back(posterior_score(instance.g1, instance.g2, m, params).log_score);
      oracle.push_back(oracle_posterior(instance.g1, instance.g2, m, params));
    }
    for (std::size_t a = 0; a < oracle.size(); ++a) {
      for (std::size_t b = 0; b < oracle.size(); ++b) {
        const double want = oracle[a] / oracle[b];
        const double got = std::exp(log_scores[a] - log_scores[b]);
        worst = std::max(worst, std::abs(got - want) / want);
        ++comparisons;
      }
    }
  }
  return {worst <= 1e-9, fmt("%ld ratio pairs, worst relative error %.3g", comparisons, worst)};
}

Outcome single_community_equivalence() {
  Rng rng(0xBEEF);
  int same = 0;
  const int total = 240;
  for (int i = 0; i < total; ++i) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const ModelParams params = block_params({n}, uniform(rng, 0.05, 0.45), 0.0, uniform(rng, 0.2, 0.95));
    const DeanonInstance inst = make_instance(params, rng.engine()());
    const MatchResult weighted = brute_force_match(inst.g1, inst.g2, compute_weights(params));
    const MatchResult unit = brute_force_match(inst.g1, inst.g2, WeightTable::unit(1));
    same += weighted.tie_set == unit.tie_set ? 1 : 0;
  }
  return {same == total, fmt("%d/%d single-community instances with identical argmin sets", same, total)};
}

Outcome pruned_vs_enumeration() {
  const auto start = Clock::now();
  Rng rng(0xFACE);
  int agree = 0;
  const int total = 60;
  int largest = 0;
  for (int i = 0; i < total; ++i) {
    // Every other instance has the full eight nodes.
    const std::vector<int> sizes = i % 2 ? random_sizes(rng, 2, 8) : random_sizes(rng, 8, 8);
    largest = std::max(largest, static_cast<int>(*std::max_element(sizes.begin(), sizes.end())));
    const ModelParams params = random_params(rng, sizes, 0.2, 1.0);
    const DeanonInstance inst = make_instance(params, rng.engine()());
    const bool unit = rng.bernoulli(0.3);
    const WeightTable w = unit ? WeightTable::unit(params.k()) : compute_weights(params);
    const MatchResult pruned = exact_match(inst.g1, inst.g2, w);
    const MatchResult brute = brute_force_match(inst.g1, inst.g2, w);
    agree += pruned.best_cost.weighted == brute.best_cost.weighted && pruned.tie_set == brute.tie_set &&
                     pruned.best == brute.best
                 ? 1
                 : 0;
  }
  const double elapsed = seconds_since(start);
  return {agree == total && elapsed < 120.0,
          fmt("%d/%d instances with identical best cost and tie set, largest community %d, %.2f s", agree, total,
              largest, elapsed)};
}

Outcome partition_invariants() {
  Rng rng(0xABCD);
  int ok = 0;
  const int total = 1000;
  std::size_t largest = 0;
  std::vector<signed char> part_of;
  for (int i = 0; i < total; ++i) {
    const int n = 2 + static_cast<int>(rng.below(999));
    const int n1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const ModelParams params = block_params({n1, n - n1}, 0.1, 0.1, 0.5);
    const Matching pi = random_matching(params, rng.engine()());
    const MismatchSets sets = mismatch_sets(pi, params.sizes);
    largest = std::max<std::size_t>(largest, static_cast<std::size_t>(n));

    // Enumerated sizes against the closed forms.
    bool good = static_cast<std::int64_t>(sets.intra.size()) == sets.intra_closed_form &&
                static_cast<std::int64_t>(sets.inter.size()) == sets.inter_closed_form;

    part_of.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    for (const std::vector<Edge>* pairs : {&sets.intra, &sets.inter}) {
      const PartitionResult r = partition_pairs(pi, *pairs);
      std::size_t covered = 0;
      for (int part = 0; part < 3; ++part) {
        good = good && r.parts[part].size() >= pairs->size() / 3;
        for (const Edge& e : r.parts[part]) {
          auto& slot = part_of[static_cast<std::size_t>(e.u) * n + e.v];
          good = good && slot == -1;
          slot = static_cast<signed char>(part);
        }
        covered += r.parts[part].size();
      }
      good = good && covered == pairs->size();
      for (int part = 0; part < 3; ++part) {
        for (const Edge& e : r.parts[part]) {
          const Edge image = pi(e);
          good = good && part_of[static_cast<std::size_t>(image.u) * n + image.v] != part;
        }
      }
      for (const Edge& e : *pairs) part_of[static_cast<std::size_t>(e.u) * n + e.v] = -1;
    }
    ok += good ? 1 : 0;
  }
  return {ok == total, fmt("%d/%d matchings (n up to %zu) satisfy disjointness, size floor and size identity",
                           ok, total, largest)};
}

Outcome chernoff_validity() {
  const auto start = Clock::now();
  int cells = 0, ok = 0;
  double worst_ratio = -1.0;
  std::string worst;
  std::uint64_t seed = 1;
  for (double p : {0.01, 0.05, 0.1}) {
    for (double q : {0.01, 0.05, 0.1}) {
      for (double s : {0.3, 0.5, 0.8}) {
        const EventProbs probs = event_probs(p, q, s);
        for (std::int64_t nz : {10, 100, 1000}) {
          for (std::int64_t nt : {10, 100, 1000}) {
            const TailEstimate tail = empirical_tail(nz, nt, probs, 100000, seed++);
            const double bound = chernoff_bound(nz, nt, probs);
            const double allowed = bound + 3 * tail.half_width;
            ++cells;
            ok += tail.estimate <= allowed ? 1 : 0;
            if (tail.estimate / allowed > worst_ratio) {
              worst_ratio = tail.estimate / allowed;
              worst = fmt("p=%g q=%g s=%g nZ=%lld nT=%lld est=%.4g bound=%.4g", p, q, s,
                          static_cast<long long>(nz), static_cast<long long>(nt), tail.estimate, bound);
            }
          }
        }
      }
    }
  }
  return {ok == cells, fmt("%d/%d cells within bound + 3 CI, highest estimate/allowance %.3f at %s, %.1f s", ok, cells,
                           worst_ratio, worst.c_str(),
                           seconds_since(start))};
}

Outcome automorphism_characterization() {
  Rng rng(0x5EED);
  int ok = 0, singletons = 0;
  const int total = 120;
  for (int i = 0; i < total; ++i) {
    const std::vector<int> sizes = random_sizes(rng, 2, 7);
    const ModelParams params = block_params(sizes, uniform(rng, 0.15, 0.45), uniform(rng, 0.05, 0.45), 1.0);
    const DeanonInstance inst = make_instance(params, rng.engine()());
    const MatchResult match = exact_match(inst.g1, inst.g2, compute_weights(params));

    std::vector<Matching> expected;
    for (const Matching& sigma : automorphism_check(inst.g)) expected.push_back(inst.truth.compose(sigma));
    std::sort(expected.begin(), expected.end());

    const bool singleton = expected.size() == 1;
    // The estimator recovers the truth when it is the only minimizer.
    const bool recovered = match.tie_set.size() == 1 && match.best == inst.truth;
    singletons += singleton ? 1 : 0;
    ok += match.tie_set == expected && recovered == singleton ? 1 : 0;
  }
  return {ok == total && singletons > 0 && singletons < total,
          fmt("%d/%d instances match, %d with a trivial automorphism group", ok, total, singletons)};
}

Outcome threshold_trend() {
  const int trials = 200;
  int above = 0, below = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(0x7E57, static_cast<std::uint64_t>(t));
    for (const bool high : {true, false}) {
      const ModelParams params = high ? block_params({6, 6}, 0.45, 0.3, 0.9) : block_params({6, 6}, 0.02, 0.01, 0.9);
      const DeanonInstance inst = make_instance(params, seed);
      ExactOptions opts;
      opts.tie_limit = 0;
      const MatchResult match = exact_match(inst.g1, inst.g2, compute_weights(params), opts);
      const bool perfect = score_success(match.best, inst.truth, inst.g1.community_of()).perfect;
      (high ? above : below) += perfect ? 1 : 0;
    }
  }
  const Interval hi = wilson_interval(static_cast<std::uint64_t>(above), trials);
  const Interval lo = wilson_interval(static_cast<std::uint64_t>(below), trials);
  const double gap = static_cast<double>(above - below) / trials;
  return {gap >= 0.3 && lo.hi < hi.lo,
          fmt("above %d/%d [%.3f, %.3f], below %d/%d [%.3f, %.3f], gap %.3f", above, trials, hi.lo, hi.hi, below,
              trials, lo.lo, lo.hi, gap)};
}

Outcome weight_ratio_limit() {
  std::vector<double> gaps;
  for (double t : {1e-2, 1e-3, 1e-4}) gaps.push_back(std::abs(mismatch_weight(t, 0.5) / mismatch_weight(t / 2, 0.5) - 1));
  const bool pass = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {pass, fmt("|w11/w12 - 1| = %.6f, %.6f, %.6f", gaps[0], gaps[1], gaps[2])};
}

Outcome inter_community_help() {
  int checked = 0, ok = 0;
  for (const auto& [n1, n2] : std::vector<std::pair<int, int>>{{6, 6}, {50, 80}, {200, 100}, {1000, 1000}}) {
    for (double p : {0.01, 0.1, 0.3}) {
      for (double s : {0.3, 0.6, 0.9, 1.0}) {
        double last = -INFINITY;
        for (int step = 0; step <= 20; ++step) {
          const double q = 0.01 * step;
          const double slack = threshold_report(SymmetricModel{n1, n2, p, q, s}).communities[0].slack_c1;
          ++checked;
          ok += slack > last ? 1 : 0;
          last = slack;
        }
      }
    }
  }
  return {ok == checked, fmt("%d/%d grid steps strictly increasing", ok, checked)};
}

}  // namespace

int main() {
  const PosteriorInstances inst = posterior_instances();
  report(1, "argmax posterior equals argmin weighted cost", map_equivalence(inst));
  report(2, "closed-form posterior ratios match brute-force ratios", score_ratios(inst));
  report(3, "single community: weighted and unweighted argmin sets coincide", single_community_equivalence());
  report(4, "branch and bound equals full enumeration", pruned_vs_enumeration());
  report(5, "three-part partition of moved pairs", partition_invariants());
  report(6, "Chernoff bound dominates the Monte Carlo tail", chernoff_validity());
  report(7, "s = 1 minimizers are the truth composed with automorphisms", automorphism_characterization());
  report(8, "success rate above vs below threshold", threshold_trend());
  report(9, "weight ratio tends to 1 as p = 2q shrinks", weight_ratio_limit());
  report(10, "threshold slack of community 1 increases with q", inter_community_help());
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
