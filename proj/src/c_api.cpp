#include "deanon/deanon.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "deanon/analysis.hpp"
#include "deanon/cost.hpp"
#include "deanon/harness.hpp"
#include "deanon/json_io.hpp"
#include "deanon/matcher.hpp"
#include "deanon/sampler.hpp"

struct deanon_params {
  deanon::ModelParams value;
};

struct deanon_instance {
  deanon::DeanonInstance value;
};

namespace {

using deanon::io::json;

thread_local std::string g_last_error;

deanon_status fail(deanon_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
deanon_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const deanon::BudgetExceeded& e) {
    return fail(DEANON_ERR_BUDGET, e.what());
  } catch (const deanon::ValidationError& e) {
    return fail(DEANON_ERR_INVALID_ARGUMENT, e.what());
  } catch (const json::parse_error& e) {
    return fail(DEANON_ERR_PARSE, e.what());
  } catch (const json::exception& e) {
    return fail(DEANON_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DEANON_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DEANON_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse(const char* text) {
  if (!text) throw deanon::ValidationError("null JSON input");
  return json::parse(text);
}

#define DEANON_REQUIRE(ptr)                                                   \
  do {                                                                        \
    if (!(ptr)) return fail(DEANON_ERR_INVALID_ARGUMENT, #ptr " is null");    \
  } while (0)

}  // namespace

extern "C" {

const char* deanon_version(void) { return "1.0.0"; }

const char* deanon_last_error(void) { return g_last_error.c_str(); }

const char* deanon_status_name(deanon_status status) {
  switch (status) {
    case DEANON_OK: return "ok";
    case DEANON_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DEANON_ERR_PARSE: return "parse error";
    case DEANON_ERR_BUDGET: return "budget exceeded";
    case DEANON_ERR_CELL_FAILED: return "experiment cell failed";
    case DEANON_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void deanon_string_free(char* str) { delete[] str; }

deanon_status deanon_params_from_json(const char* text, deanon_validation mode, deanon_params** out) {
  DEANON_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto params = deanon::io::params_from_json(parse(text));
    deanon::validate_params(params, mode == DEANON_VALIDATE_STRICT ? deanon::ValidationMode::kStrict
                                                                   : deanon::ValidationMode::kGenerationOnly);
    *out = new deanon_params{std::move(params)};
    return DEANON_OK;
  });
}

deanon_status deanon_params_to_json(const deanon_params* params, char** out_json) {
  DEANON_REQUIRE(params);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    *out_json = copy_string(deanon::io::to_json(params->value).dump());
    return DEANON_OK;
  });
}

int deanon_params_node_count(const deanon_params* params) { return params ? params->value.n() : -1; }

void deanon_params_free(deanon_params* params) { delete params; }

deanon_status deanon_mismatch_weight(double p, double s, double* out) {
  DEANON_REQUIRE(out);
  return guarded([&] {
    *out = deanon::compute_weights(deanon::ModelParams::single_community(2, p, s))(0, 0);
    return DEANON_OK;
  });
}

deanon_status deanon_instance_generate(const deanon_params* params, uint64_t seed, deanon_instance** out) {
  DEANON_REQUIRE(params);
  DEANON_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new deanon_instance{deanon::make_instance(params->value, seed)};
    return DEANON_OK;
  });
}

deanon_status deanon_instance_from_json(const char* text, deanon_instance** out) {
  DEANON_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new deanon_instance{deanon::io::instance_from_json(parse(text))};
    return DEANON_OK;
  });
}

deanon_status deanon_instance_to_json(const deanon_instance* instance, char** out_json) {
  DEANON_REQUIRE(instance);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    *out_json = copy_string(deanon::io::to_json(instance->value).dump());
    return DEANON_OK;
  });
}

int deanon_instance_node_count(const deanon_instance* instance) {
  return instance ? instance->value.g.n() : -1;
}

deanon_status deanon_instance_truth(const deanon_instance* instance, int* forward, size_t len) {
  DEANON_REQUIRE(instance);
  DEANON_REQUIRE(forward);
  const auto& truth = instance->value.truth.forward();
  if (len < truth.size()) return fail(DEANON_ERR_INVALID_ARGUMENT, "output buffer too small");
  std::copy(truth.begin(), truth.end(), forward);
  return DEANON_OK;
}

void deanon_instance_free(deanon_instance* instance) { delete instance; }

deanon_status deanon_cost(const deanon_instance* instance, const char* matching_json, int unweighted,
                          char** out_json) {
  DEANON_REQUIRE(instance);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    const auto& inst = instance->value;
    const deanon::Matching pi = deanon::io::matching_from_json(parse(matching_json));
    const deanon::WeightTable weights =
        unweighted ? deanon::WeightTable::unit(inst.params.k()) : deanon::compute_weights(inst.params);
    json out = deanon::io::to_json(deanon::delta(inst.g1, inst.g2, pi, weights));
    out["weights"] = deanon::io::to_json(weights);
    out["variant"] = unweighted ? "unweighted" : "weighted";
    *out_json = copy_string(out.dump(2));
    return DEANON_OK;
  });
}

deanon_status deanon_match(const deanon_instance* instance, const deanon_match_options* options,
                           char** out_json) {
  DEANON_REQUIRE(instance);
  DEANON_REQUIRE(options);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    const auto& inst = instance->value;
    const deanon::WeightTable weights =
        options->unweighted ? deanon::WeightTable::unit(inst.params.k()) : deanon::compute_weights(inst.params);
    deanon::MatchResult result;
    if (options->mode == DEANON_MATCH_EXACT) {
      deanon::ExactOptions opts;
      if (options->budget > 0) opts.budget = options->budget;
      result = deanon::exact_match(inst.g1, inst.g2, weights, opts);
    } else {
      deanon::LocalSearchOptions opts;
      opts.restarts = options->restarts;
      opts.seed = options->seed;
      result = deanon::local_search_match(inst.g1, inst.g2, weights, opts);
    }
    const deanon::SuccessReport success = deanon::score_success(result.best, inst.truth, inst.g1.community_of());
    json out = {{"match", deanon::io::to_json(result)},
                {"success", deanon::io::to_json(success)},
                {"variant", options->unweighted ? "unweighted" : "weighted"}};
    *out_json = copy_string(out.dump(2));
    return DEANON_OK;
  });
}

deanon_status deanon_theory(const deanon_params* params, char** out_json) {
  DEANON_REQUIRE(params);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    const deanon::SymmetricModel model = deanon::symmetric_model(params->value);
    const auto cells = static_cast<double>(model.n1 + 1) * (model.n2 + 1);
    json out = {{"thresholds", deanon::io::to_json(deanon::threshold_report(model))},
                {"expected_S", deanon::io::to_json(deanon::expected_s_bound(model, cells <= 1e5))}};
    *out_json = copy_string(out.dump(2));
    return DEANON_OK;
  });
}

deanon_status deanon_bounds(const deanon_bounds_options* options, char** out_json) {
  DEANON_REQUIRE(options);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    const deanon::EventProbs probs = deanon::event_probs(options->p, options->q, options->s);
    json out = {{"probs",
                 {{"u1", probs.u1}, {"u2", probs.u2}, {"u3", probs.u3},
                  {"v1", probs.v1}, {"v2", probs.v2}, {"v3", probs.v3}}},
                {"n_z", options->n_z},
                {"n_t", options->n_t},
                {"chernoff_bound", deanon::chernoff_bound(options->n_z, options->n_t, probs)}};
    if (options->trials > 0) {
      const deanon::TailEstimate tail =
          deanon::empirical_tail(options->n_z, options->n_t, probs, options->trials, options->seed);
      out["empirical"] = {{"estimate", tail.estimate},
                          {"half_width_99", tail.half_width},
                          {"hits", tail.hits},
                          {"trials", tail.trials}};
    }
    *out_json = copy_string(out.dump(2));
    return DEANON_OK;
  });
}

deanon_status deanon_experiment(const char* config_json, char** out_csv, char** out_summary_json) {
  DEANON_REQUIRE(config_json);
  DEANON_REQUIRE(out_csv);
  return guarded([&] {
    const deanon::ExperimentResult result =
        deanon::run_experiment(deanon::parse_experiment_config(config_json));
    *out_csv = copy_string(deanon::trials_csv(result));
    if (out_summary_json) *out_summary_json = copy_string(deanon::summary_json(result));
    return result.has_errors() ? fail(DEANON_ERR_CELL_FAILED, "one or more experiment cells failed")
                               : DEANON_OK;
  });
}

deanon_status deanon_compare(const char* config_json, char** out_json) {
  DEANON_REQUIRE(config_json);
  DEANON_REQUIRE(out_json);
  return guarded([&] {
    const deanon::CompareResult result = deanon::compare_costs(deanon::parse_experiment_config(config_json));
    *out_json = copy_string(deanon::compare_json(result));
    return result.experiment.has_errors() ? fail(DEANON_ERR_CELL_FAILED, "one or more experiment cells failed")
                                          : DEANON_OK;
  });
}

deanon_status deanon_phase(const char* config_json, const char* axis, char** out_csv) {
  DEANON_REQUIRE(config_json);
  DEANON_REQUIRE(axis);
  DEANON_REQUIRE(out_csv);
  return guarded([&] {
    const deanon::PhaseCurve curve =
        deanon::phase_curve(deanon::parse_experiment_config(config_json), deanon::parse_axis(axis));
    *out_csv = copy_string(deanon::phase_csv(curve));
    return curve.experiment.has_errors() ? fail(DEANON_ERR_CELL_FAILED, "one or more experiment cells failed")
                                         : DEANON_OK;
  });
}

}  // extern "C"
