#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deanon/analysis.hpp"
#include "deanon/graph_model.hpp"
#include "deanon/matcher.hpp"

namespace deanon {

enum class CostVariant { kWeighted, kUnweighted };

const char* variant_name(CostVariant v);

/// Monte Carlo sweep over a (sizes x p x q x s) grid.
///
/// Diagonal blocks get p, off-diagonal blocks get q. For single-community
/// sizes the q axis collapses to q = 0.
struct ExperimentConfig {
  std::vector<std::vector<int>> sizes;
  std::vector<double> p;
  std::vector<double> q{0.0};
  std::vector<double> s;
  int trials = 0;
  MatchMode mode = MatchMode::kExact;
  int restarts = 8;
  std::vector<CostVariant> variants{CostVariant::kWeighted};
  std::uint64_t seed = 0;
  double exact_budget = 1e8;
  /// Adds a wall-clock column to the trial CSV (which then stops being
  /// byte-reproducible).
  bool record_runtime = false;
  /// 0: DEANON_THREADS, else hardware concurrency.
  int threads = 0;
};

/// Parses the config JSON; see README for the schema.
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct Cell {
  std::size_t index = 0;
  std::vector<int> sizes;
  double p = 0;
  double q = 0;
  double s = 0;
  ModelParams params;
  /// Threshold report when the cell has k <= 2; absent otherwise.
  std::optional<ThresholdReport> thresholds;
  /// Non-empty when the cell was skipped.
  std::string error;
};

std::vector<Cell> expand_grid(const ExperimentConfig& config);

struct TrialRecord {
  std::size_t cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  CostVariant variant = CostVariant::kWeighted;
  bool perfect = false;
  double fraction_correct = 0.0;
  std::uint64_t tie_count = 0;
  double runtime_ms = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for `successes` out of `trials` (95% by default).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct CellSummary {
  std::size_t cell = 0;
  CostVariant variant = CostVariant::kWeighted;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  Interval wilson;
  double mean_fraction_correct = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Cell> cells;
  /// Sorted by (cell, trial, variant order in the config).
  std::vector<TrialRecord> records;
  std::vector<CellSummary> summaries;

  bool has_errors() const;
};

/// Runs every cell; a cell that fails validation or the search budget is
/// reported through Cell::error and the rest still run. Output is a pure
/// function of the config, whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Versioned trial CSV: "#schema=deanon-trials/1" line, header, one row per record.
std::string trials_csv(const ExperimentResult& result);
std::string summary_json(const ExperimentResult& result);

struct CompareRow {
  std::size_t cell = 0;
  int trials = 0;
  double weighted_rate = 0.0;
  double unweighted_rate = 0.0;
  /// Mean of perfect_weighted - perfect_unweighted over paired trials.
  double mean_difference = 0.0;
  /// 95% normal half-width of the paired mean difference.
  double half_width = 0.0;
  int weighted_only = 0;
  int unweighted_only = 0;
};

struct CompareResult {
  ExperimentResult experiment;
  std::vector<CompareRow> rows;
};

/// Weighted vs unit-weight cost on the same instances (paired trials).
CompareResult compare_costs(ExperimentConfig config);
std::string compare_json(const CompareResult& result);

enum class PhaseAxis { kN, kP, kQ, kS };
PhaseAxis parse_axis(const std::string& name);

struct PhaseMarker {
  std::string label;
  double value = 0.0;
};

struct PhaseCurve {
  PhaseAxis axis = PhaseAxis::kP;
  ExperimentResult experiment;
  std::vector<PhaseMarker> markers;
};

/// Success rate along one swept axis, with the analytic threshold locations
/// (both q-term variants per community, and the single-community reduction
/// when it applies) emitted as markers. All other axes must be single-valued.
PhaseCurve phase_curve(const ExperimentConfig& config, PhaseAxis axis);
std::string phase_csv(const PhaseCurve& curve);

}  // namespace deanon
