#include "deanon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "deanon/json_io.hpp"
#include "deanon/random.hpp"

namespace deanon {

namespace {

using io::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string sizes_label(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  try {
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field \"") + key + "\": " + e.what());
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DEANON_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

ModelParams cell_params(const std::vector<int>& sizes, double p, double q, double s) {
  ModelParams params;
  params.sizes = sizes;
  const int k = params.k();
  params.edge_prob.assign(static_cast<std::size_t>(k * k), q);
  for (int i = 0; i < k; ++i) params.edge_prob[static_cast<std::size_t>(i * k + i)] = p;
  params.sample_prob = s;
  return params;
}

bool wants(const ExperimentConfig& config, CostVariant v) {
  return std::find(config.variants.begin(), config.variants.end(), v) != config.variants.end();
}

}  // namespace

const char* variant_name(CostVariant v) {
  return v == CostVariant::kWeighted ? "weighted" : "unweighted";
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");

  ExperimentConfig config;
  try {
    if (!j.contains("sizes")) throw ValidationError("config needs \"sizes\"");
    const json& sizes = j.at("sizes");
    if (!sizes.is_array() || sizes.empty()) throw ValidationError("\"sizes\" must be a nonempty array");
    if (sizes.front().is_number()) {
      config.sizes.push_back(sizes.get<std::vector<int>>());
    } else {
      config.sizes = sizes.get<std::vector<std::vector<int>>>();
    }
    config.p = number_list(j, "p", {});
    config.q = number_list(j, "q", {0.0});
    config.s = number_list(j, "s", {});
    config.trials = j.value("trials", 0);
    const std::string mode = j.value("mode", std::string("exact"));
    if (mode == "exact") {
      config.mode = MatchMode::kExact;
    } else if (mode == "local") {
      config.mode = MatchMode::kLocalSearch;
    } else {
      throw ValidationError("mode must be \"exact\" or \"local\"");
    }
    config.restarts = j.value("restarts", 8);
    if (j.contains("variants")) {
      config.variants.clear();
      for (const auto& name : j.at("variants").get<std::vector<std::string>>()) {
        if (name == "weighted") {
          config.variants.push_back(CostVariant::kWeighted);
        } else if (name == "unweighted") {
          config.variants.push_back(CostVariant::kUnweighted);
        } else {
          throw ValidationError("unknown cost variant \"" + name + "\"");
        }
      }
    }
    config.seed = j.value("seed", std::uint64_t{0});
    config.exact_budget = j.value("exact_budget", 1e8);
    config.record_runtime = j.value("record_runtime", false);
    config.threads = j.value("threads", 0);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config: ") + e.what());
  }

  if (config.p.empty() || config.s.empty()) throw ValidationError("config needs nonempty \"p\" and \"s\"");
  if (config.q.empty()) throw ValidationError("\"q\" must not be empty");
  if (config.trials < 0) throw ValidationError("\"trials\" must be >= 0");
  if (config.variants.empty()) throw ValidationError("\"variants\" must not be empty");
  if (config.restarts < 1) throw ValidationError("\"restarts\" must be >= 1");
  return config;
}

std::vector<Cell> expand_grid(const ExperimentConfig& config) {
  if (config.sizes.empty() || config.p.empty() || config.q.empty() || config.s.empty()) {
    throw ValidationError("experiment grid is empty");
  }
  std::vector<Cell> cells;
  for (const auto& sizes : config.sizes) {
    const std::vector<double> qs = sizes.size() == 1 ? std::vector<double>{0.0} : config.q;
    for (double p : config.p) {
      for (double q : qs) {
        for (double s : config.s) {
          Cell cell;
          cell.index = cells.size();
          cell.sizes = sizes;
          cell.p = p;
          cell.q = q;
          cell.s = s;
          cell.params = cell_params(sizes, p, q, s);
          try {
            validate_params(cell.params, wants(config, CostVariant::kWeighted) ? ValidationMode::kStrict
                                                                                : ValidationMode::kGenerationOnly);
            if (config.mode == MatchMode::kExact && pi_cardinality(sizes) > config.exact_budget) {
              throw BudgetExceeded("cell needs " + fmt(pi_cardinality(sizes)) +
                                   " matchings, over the exact budget " + fmt(config.exact_budget));
            }
            if (sizes.size() <= 2) cell.thresholds = threshold_report(cell.params);
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (phat + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

bool ExperimentResult::has_errors() const {
  return std::any_of(cells.begin(), cells.end(), [](const Cell& c) { return !c.error.empty(); });
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 0) throw ValidationError("trials must be >= 0");
  if (config.variants.empty()) throw ValidationError("no cost variants selected");
  ExperimentResult result;
  result.config = config;
  result.cells = expand_grid(config);

  struct Task {
    std::size_t cell;
    int trial;
  };
  std::vector<Task> tasks;
  for (const Cell& cell : result.cells) {
    if (!cell.error.empty()) continue;
    for (int t = 0; t < config.trials; ++t) tasks.push_back({cell.index, t});
  }

  const std::size_t nv = config.variants.size();
  std::vector<TrialRecord> slots(tasks.size() * nv);
  std::vector<std::string> task_errors(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Cell& cell = result.cells[tasks[i].cell];
      const std::uint64_t seed = derive_seed(derive_seed(config.seed, cell.index), static_cast<std::uint64_t>(tasks[i].trial));
      try {
        const DeanonInstance inst = make_instance(cell.params, seed);
        for (std::size_t v = 0; v < nv; ++v) {
          const CostVariant variant = config.variants[v];
          const WeightTable weights =
              variant == CostVariant::kWeighted ? compute_weights(cell.params) : WeightTable::unit(cell.params.k());
          const auto start = std::chrono::steady_clock::now();
          MatchResult match;
          if (config.mode == MatchMode::kExact) {
            ExactOptions opts;
            opts.budget = config.exact_budget;
            opts.tie_limit = 0;
            match = exact_match(inst.g1, inst.g2, weights, opts);
          } else {
            LocalSearchOptions opts;
            opts.restarts = config.restarts;
            opts.seed = derive_seed(seed, 17);
            match = local_search_match(inst.g1, inst.g2, weights, opts);
          }
          const auto stop = std::chrono::steady_clock::now();
          const SuccessReport success = score_success(match.best, inst.truth, inst.g1.community_of());
          TrialRecord& rec = slots[i * nv + v];
          rec.cell = cell.index;
          rec.trial = tasks[i].trial;
          rec.seed = seed;
          rec.variant = variant;
          rec.perfect = success.perfect;
          rec.fraction_correct = success.fraction_correct;
          rec.tie_count = match.tie_count;
          rec.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        }
      } catch (const std::exception& e) {
        task_errors[i] = e.what();
      }
    }
  };

  const int workers = std::min<int>(resolve_threads(config.threads), static_cast<int>(std::max<std::size_t>(1, tasks.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<char> failed(tasks.size(), 0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (task_errors[i].empty()) continue;
    failed[i] = 1;
    Cell& cell = result.cells[tasks[i].cell];
    if (cell.error.empty()) cell.error = "trial " + std::to_string(tasks[i].trial) + ": " + task_errors[i];
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!result.cells[tasks[i].cell].error.empty()) continue;
    for (std::size_t v = 0; v < nv; ++v) result.records.push_back(slots[i * nv + v]);
  }

  for (const Cell& cell : result.cells) {
    if (!cell.error.empty()) continue;
    for (CostVariant variant : config.variants) {
      CellSummary sum;
      sum.cell = cell.index;
      sum.variant = variant;
      double fraction = 0.0;
      for (const TrialRecord& r : result.records) {
        if (r.cell != cell.index || r.variant != variant) continue;
        ++sum.trials;
        sum.successes += r.perfect ? 1 : 0;
        fraction += r.fraction_correct;
      }
      sum.rate = sum.trials ? static_cast<double>(sum.successes) / sum.trials : 0.0;
      sum.mean_fraction_correct = sum.trials ? fraction / sum.trials : 0.0;
      sum.wilson = wilson_interval(static_cast<std::uint64_t>(sum.successes), static_cast<std::uint64_t>(sum.trials));
      result.summaries.push_back(sum);
    }
  }
  return result;
}

std::string trials_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "#schema=deanon-trials/1\n";
  out << "cell,sizes,p,q,s,trial,seed,variant,perfect,fraction_correct,tie,tie_count,"
         "slack_c1_comm1,slack_c2_comm1,slack_c1_comm2,slack_c2_comm2";
  if (result.config.record_runtime) out << ",runtime_ms";
  out << '\n';
  for (const TrialRecord& r : result.records) {
    const Cell& cell = result.cells[r.cell];
    std::string slacks[4] = {"", "", "", ""};
    if (cell.thresholds) {
      for (std::size_t c = 0; c < cell.thresholds->communities.size() && c < 2; ++c) {
        slacks[2 * c] = fmt(cell.thresholds->communities[c].slack_c1);
        slacks[2 * c + 1] = fmt(cell.thresholds->communities[c].slack_c2);
      }
    }
    out << r.cell << ',' << sizes_label(cell.sizes) << ',' << fmt(cell.p) << ',' << fmt(cell.q) << ','
        << fmt(cell.s) << ',' << r.trial << ',' << r.seed << ',' << variant_name(r.variant) << ','
        << (r.perfect ? 1 : 0) << ',' << fmt(r.fraction_correct) << ',' << (r.tie_count > 1 ? 1 : 0) << ','
        << r.tie_count << ',' << slacks[0] << ',' << slacks[1] << ',' << slacks[2] << ',' << slacks[3];
    if (result.config.record_runtime) out << ',' << fmt(r.runtime_ms);
    out << '\n';
  }
  return out.str();
}

std::string summary_json(const ExperimentResult& result) {
  json cells = json::array();
  for (const Cell& cell : result.cells) {
    json c = {{"cell", cell.index}, {"sizes", cell.sizes}, {"p", cell.p}, {"q", cell.q}, {"s", cell.s}};
    if (!cell.error.empty()) c["error"] = cell.error;
    if (cell.thresholds) c["thresholds"] = io::to_json(*cell.thresholds);
    json variants = json::array();
    for (const CellSummary& sum : result.summaries) {
      if (sum.cell != cell.index) continue;
      variants.push_back({{"variant", variant_name(sum.variant)},
                          {"trials", sum.trials},
                          {"successes", sum.successes},
                          {"rate", sum.rate},
                          {"wilson_lo", sum.wilson.lo},
                          {"wilson_hi", sum.wilson.hi},
                          {"mean_fraction_correct", sum.mean_fraction_correct}});
    }
    c["variants"] = variants;
    cells.push_back(std::move(c));
  }
  return json{{"schema", "deanon-summary/1"}, {"cells", cells}}.dump(2);
}

CompareResult compare_costs(ExperimentConfig config) {
  config.variants = {CostVariant::kWeighted, CostVariant::kUnweighted};
  CompareResult out;
  out.experiment = run_experiment(config);
  // Records come in (weighted, unweighted) pairs per trial.
  for (const Cell& cell : out.experiment.cells) {
    if (!cell.error.empty()) continue;
    CompareRow row;
    row.cell = cell.index;
    std::vector<double> diffs;
    int w_hits = 0;
    int u_hits = 0;
    const auto& recs = out.experiment.records;
    for (std::size_t i = 0; i + 1 < recs.size(); i += 2) {
      if (recs[i].cell != cell.index) continue;
      const bool w = recs[i].perfect;
      const bool u = recs[i + 1].perfect;
      w_hits += w;
      u_hits += u;
      row.weighted_only += (w && !u);
      row.unweighted_only += (u && !w);
      diffs.push_back(static_cast<double>(w) - static_cast<double>(u));
    }
    row.trials = static_cast<int>(diffs.size());
    if (row.trials > 0) {
      row.weighted_rate = static_cast<double>(w_hits) / row.trials;
      row.unweighted_rate = static_cast<double>(u_hits) / row.trials;
      double mean = 0.0;
      for (double d : diffs) mean += d;
      mean /= row.trials;
      double var = 0.0;
      for (double d : diffs) var += (d - mean) * (d - mean);
      var = row.trials > 1 ? var / (row.trials - 1) : 0.0;
      row.mean_difference = mean;
      row.half_width = 1.959963984540054 * std::sqrt(var / row.trials);
    }
    out.rows.push_back(row);
  }
  return out;
}

std::string compare_json(const CompareResult& result) {
  json rows = json::array();
  for (const CompareRow& r : result.rows) {
    const Cell& cell = result.experiment.cells[r.cell];
    rows.push_back({{"cell", r.cell},
                    {"sizes", cell.sizes},
                    {"p", cell.p},
                    {"q", cell.q},
                    {"s", cell.s},
                    {"trials", r.trials},
                    {"weighted_rate", r.weighted_rate},
                    {"unweighted_rate", r.unweighted_rate},
                    {"mean_difference", r.mean_difference},
                    {"ci_half_width", r.half_width},
                    {"weighted_only", r.weighted_only},
                    {"unweighted_only", r.unweighted_only}});
  }
  json errors = json::array();
  for (const Cell& cell : result.experiment.cells) {
    if (!cell.error.empty()) errors.push_back({{"cell", cell.index}, {"error", cell.error}});
  }
  return json{{"schema", "deanon-compare/1"}, {"rows", rows}, {"errors", errors}}.dump(2);
}

PhaseAxis parse_axis(const std::string& name) {
  if (name == "n") return PhaseAxis::kN;
  if (name == "p") return PhaseAxis::kP;
  if (name == "q") return PhaseAxis::kQ;
  if (name == "s") return PhaseAxis::kS;
  throw ValidationError("axis must be one of n, p, q, s");
}

namespace {

const char* axis_name(PhaseAxis axis) {
  switch (axis) {
    case PhaseAxis::kN: return "n";
    case PhaseAxis::kP: return "p";
    case PhaseAxis::kQ: return "q";
    case PhaseAxis::kS: return "s";
  }
  return "?";
}

double axis_value(const Cell& cell, PhaseAxis axis) {
  switch (axis) {
    case PhaseAxis::kN: {
      int n = 0;
      for (int v : cell.sizes) n += v;
      return n;
    }
    case PhaseAxis::kP: return cell.p;
    case PhaseAxis::kQ: return cell.q;
    case PhaseAxis::kS: return cell.s;
  }
  return 0.0;
}

// Solves s (1 - sqrt(1 - s^2)) = target on (0, 1]; the left side increases from 0 to 1.
std::optional<double> invert_sampling_factor(double target) {
  if (!(target > 0.0) || target > 1.0) return std::nullopt;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sampling_factor(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PhaseCurve phase_curve(const ExperimentConfig& config, PhaseAxis axis) {
  auto single = [&](std::size_t count, PhaseAxis which) {
    if (axis != which && count != 1) {
      throw ValidationError(std::string("phase curve sweeps only \"") + axis_name(axis) + "\"; axis \"" +
                            axis_name(which) + "\" must have exactly one value");
    }
  };
  single(config.sizes.size(), PhaseAxis::kN);
  single(config.p.size(), PhaseAxis::kP);
  single(config.q.size(), PhaseAxis::kQ);
  single(config.s.size(), PhaseAxis::kS);

  PhaseCurve curve;
  curve.axis = axis;
  curve.experiment = run_experiment(config);

  if (axis == PhaseAxis::kN || config.sizes.front().size() > 2) return curve;
  const auto& sizes = config.sizes.front();
  const int n1 = sizes[0];
  const int n2 = sizes.size() > 1 ? sizes[1] : 0;
  const double p = config.p.front();
  const double q = sizes.size() > 1 ? config.q.front() : 0.0;
  const double s = config.s.front();

  struct Side {
    int n_this;
    int n_other;
    std::string name;
  };
  std::vector<Side> sides{{n1, n2, "comm1"}};
  if (n2 > 0) sides.push_back({n2, n1, "comm2"});

  auto add_marker = [&](const std::string& label, std::optional<double> value) {
    if (value && std::isfinite(*value)) curve.markers.push_back({label, *value});
  };

  for (const Side& side : sides) {
    const double rhs = 3.0 * std::log(static_cast<double>(side.n_this)) / side.n_this;
    const double ratio = side.n_other > 0 ? static_cast<double>(side.n_other) / side.n_this : 0.0;
    for (int c = 1; c <= 2; ++c) {
      const std::string label = "c" + std::to_string(c) + "_" + side.name;
      const double cr = c * ratio;
      switch (axis) {
        case PhaseAxis::kP:
          add_marker(label, rhs / sampling_factor(s) - cr * q);
          break;
        case PhaseAxis::kQ:
          if (cr > 0.0) add_marker(label, (rhs / sampling_factor(s) - p) / cr);
          break;
        case PhaseAxis::kS:
          add_marker(label, invert_sampling_factor(rhs / (p + cr * q)));
          break;
        case PhaseAxis::kN:
          break;
      }
    }
  }
  if (n2 == 0 || (q == 0.0 && n1 == n2)) {
    const double rhs = 3.0 * std::log(static_cast<double>(n1)) / n1;
    if (axis == PhaseAxis::kP) add_marker("single_community", rhs / sampling_factor(s));
    if (axis == PhaseAxis::kS && p > 0.0) add_marker("single_community", invert_sampling_factor(rhs / p));
  }
  return curve;
}

std::string phase_csv(const PhaseCurve& curve) {
  std::ostringstream out;
  out << "#schema=deanon-phase/1\n";
  out << "kind,axis,value,variant,trials,successes,rate,wilson_lo,wilson_hi,slack_c1_comm1,slack_c2_comm1,label\n";
  const char* axis = axis_name(curve.axis);
  const ExperimentResult& exp = curve.experiment;
  for (const CellSummary& sum : exp.summaries) {
    if (sum.trials == 0) continue;
    const Cell& cell = exp.cells[sum.cell];
    std::string slack1;
    std::string slack2;
    if (cell.thresholds) {
      slack1 = fmt(cell.thresholds->communities[0].slack_c1);
      slack2 = fmt(cell.thresholds->communities[0].slack_c2);
    }
    out << "rate," << axis << ',' << fmt(axis_value(cell, curve.axis)) << ',' << variant_name(sum.variant) << ','
        << sum.trials << ',' << sum.successes << ',' << fmt(sum.rate) << ',' << fmt(sum.wilson.lo) << ','
        << fmt(sum.wilson.hi) << ',' << slack1 << ',' << slack2 << ",\n";
  }
  for (const PhaseMarker& m : curve.markers) {
    out << "marker," << axis << ',' << fmt(m.value) << ",,,,,,,,," << m.label << '\n';
  }
  return out.str();
}

}  // namespace deanon
