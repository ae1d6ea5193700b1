// deanon: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "deanon/deanon.h"

namespace {

struct ParamsDeleter {
  void operator()(deanon_params* p) const { deanon_params_free(p); }
};
struct InstanceDeleter {
  void operator()(deanon_instance* p) const { deanon_instance_free(p); }
};
struct StringDeleter {
  void operator()(char* s) const { deanon_string_free(s); }
};
using ParamsPtr = std::unique_ptr<deanon_params, ParamsDeleter>;
using InstancePtr = std::unique_ptr<deanon_instance, InstanceDeleter>;
using OwnedString = std::unique_ptr<char, StringDeleter>;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(2, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(2, "cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

// Throws unless `status` is OK; DEANON_ERR_CELL_FAILED is returned so the
// caller can still write its output.
deanon_status check(deanon_status status, const char* what) {
  if (status == DEANON_OK || status == DEANON_ERR_CELL_FAILED) return status;
  throw CliError(static_cast<int>(status) + 1,
                 std::string(what) + ": " + deanon_status_name(status) + ": " + deanon_last_error());
}

ParamsPtr load_params(const std::string& path, deanon_validation mode) {
  deanon_params* raw = nullptr;
  check(deanon_params_from_json(read_file(path).c_str(), mode, &raw), "params");
  return ParamsPtr(raw);
}

InstancePtr load_instance(const std::string& path) {
  deanon_instance* raw = nullptr;
  check(deanon_instance_from_json(read_file(path).c_str(), &raw), "instance");
  return InstancePtr(raw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph de-anonymization laboratory for stochastic block models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", deanon_version());

  std::string params_path, instance_path, matching_path, config_path, out_path, summary_path;
  std::string mode = "exact";
  std::string axis = "p";
  std::uint64_t seed = 0;
  int restarts = 8;
  bool unweighted = false;
  double budget = 0.0;
  deanon_bounds_options bounds{0, 0, 0.0, 0.0, 1.0, 0, 0};

  auto* gen = app.add_subcommand("gen", "Generate an instance (g, g1, g2, hidden matching)");
  gen->add_option("--params", params_path, "Model parameters JSON")->required();
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", out_path, "Output instance JSON (default stdout)");

  auto* cost = app.add_subcommand("cost", "Mismatch cost of a matching");
  cost->add_option("--instance", instance_path, "Instance JSON")->required();
  cost->add_option("--matching", matching_path, "Matching JSON (array of g2 labels)")->required();
  cost->add_flag("--unweighted", unweighted, "Use unit weights");

  auto* match = app.add_subcommand("match", "Find the minimum-cost matching");
  match->add_option("--instance", instance_path, "Instance JSON")->required();
  match->add_option("--mode", mode, "exact or local")->check(CLI::IsMember({"exact", "local"}));
  match->add_option("--restarts", restarts, "Local search restarts");
  match->add_option("--seed", seed, "Local search seed");
  match->add_option("--budget", budget, "Exact search budget on the number of matchings");
  match->add_flag("--unweighted", unweighted, "Use unit weights");
  match->add_option("--out", out_path, "Output JSON (default stdout)");

  auto* theory = app.add_subcommand("theory", "Threshold report and expected-count bound");
  theory->add_option("--params", params_path, "Model parameters JSON")->required();

  auto* bnd = app.add_subcommand("bounds", "Chernoff bound vs Monte Carlo tail");
  bnd->add_option("--nz", bounds.n_z, "Intra-community part size")->required();
  bnd->add_option("--nt", bounds.n_t, "Inter-community part size")->required();
  bnd->add_option("--p", bounds.p, "Intra-community edge probability")->required();
  bnd->add_option("--q", bounds.q, "Inter-community edge probability")->required();
  bnd->add_option("--s", bounds.s, "Sampling probability")->required();
  bnd->add_option("--trials", bounds.trials, "Monte Carlo trials (0 skips simulation)");
  bnd->add_option("--seed", bounds.seed, "Monte Carlo seed");

  auto* experiment = app.add_subcommand("experiment", "Run a seeded Monte Carlo sweep");
  experiment->add_option("--config", config_path, "Experiment config JSON")->required();
  experiment->add_option("--out", out_path, "Trial CSV (default stdout)");
  experiment->add_option("--summary", summary_path, "Per-cell summary JSON");

  auto* compare = app.add_subcommand("compare", "Weighted vs unweighted cost on paired trials");
  compare->add_option("--config", config_path, "Experiment config JSON")->required();
  compare->add_option("--out", out_path, "Output JSON (default stdout)");

  auto* phase = app.add_subcommand("phase", "Success rate along one axis with threshold markers");
  phase->add_option("--config", config_path, "Experiment config JSON")->required();
  phase->add_option("--axis", axis, "Swept axis")->check(CLI::IsMember({"n", "p", "q", "s"}));
  phase->add_option("--out", out_path, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    deanon_status final_status = DEANON_OK;
    char* raw = nullptr;
    if (*gen) {
      ParamsPtr params = load_params(params_path, DEANON_VALIDATE_GENERATION_ONLY);
      deanon_instance* inst = nullptr;
      check(deanon_instance_generate(params.get(), seed, &inst), "gen");
      InstancePtr owned(inst);
      check(deanon_instance_to_json(inst, &raw), "gen");
      emit(OwnedString(raw).get(), out_path);
    } else if (*cost) {
      InstancePtr inst = load_instance(instance_path);
      check(deanon_cost(inst.get(), read_file(matching_path).c_str(), unweighted ? 1 : 0, &raw), "cost");
      emit(OwnedString(raw).get(), "");
    } else if (*match) {
      InstancePtr inst = load_instance(instance_path);
      deanon_match_options opts{mode == "exact" ? DEANON_MATCH_EXACT : DEANON_MATCH_LOCAL, restarts, seed,
                                unweighted ? 1 : 0, budget};
      check(deanon_match(inst.get(), &opts, &raw), "match");
      emit(OwnedString(raw).get(), out_path);
    } else if (*theory) {
      ParamsPtr params = load_params(params_path, DEANON_VALIDATE_GENERATION_ONLY);
      check(deanon_theory(params.get(), &raw), "theory");
      emit(OwnedString(raw).get(), "");
    } else if (*bnd) {
      check(deanon_bounds(&bounds, &raw), "bounds");
      emit(OwnedString(raw).get(), "");
    } else if (*experiment) {
      char* summary = nullptr;
      final_status = check(deanon_experiment(read_file(config_path).c_str(), &raw, &summary), "experiment");
      OwnedString csv(raw);
      OwnedString sum(summary);
      emit(csv.get(), out_path);
      if (!summary_path.empty()) emit(sum.get(), summary_path);
    } else if (*compare) {
      final_status = check(deanon_compare(read_file(config_path).c_str(), &raw), "compare");
      emit(OwnedString(raw).get(), out_path);
    } else if (*phase) {
      final_status = check(deanon_phase(read_file(config_path).c_str(), axis.c_str(), &raw), "phase");
      emit(OwnedString(raw).get(), out_path);
    }
    if (final_status == DEANON_ERR_CELL_FAILED) {
      std::cerr << "deanon: " << deanon_last_error() << '\n';
      return 1;
    }
  } catch (const CliError& e) {
    std::cerr << "deanon: " << e.what() << '\n';
    return e.code();
  }
  return 0;
}
