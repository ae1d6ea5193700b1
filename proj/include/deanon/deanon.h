/*
 * C interface to the deanon library.
 *
 * Objects are opaque handles created and released by the library. Every
 * fallible call returns a deanon_status; on failure the message is available
 * from deanon_last_error() on the same thread until the next call. Strings
 * returned through `char **` out-parameters are NUL-terminated, owned by the
 * caller and released with deanon_string_free().
 */
#ifndef DEANON_H
#define DEANON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) || defined(__CYGWIN__)
#  ifdef DEANON_BUILDING_LIBRARY
#    define DEANON_API __declspec(dllexport)
#  else
#    define DEANON_API __declspec(dllimport)
#  endif
#else
#  if defined(__GNUC__) && (__GNUC__ >= 4)
#    define DEANON_API __attribute__((visibility("default")))
#  else
#    define DEANON_API
#  endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum deanon_status {
  DEANON_OK = 0,
  DEANON_ERR_INVALID_ARGUMENT = 1,
  DEANON_ERR_PARSE = 2,
  DEANON_ERR_BUDGET = 3,
  /* Output was produced but at least one experiment cell failed. */
  DEANON_ERR_CELL_FAILED = 4,
  DEANON_ERR_INTERNAL = 5
} deanon_status;

typedef struct deanon_params deanon_params;
typedef struct deanon_instance deanon_instance;

typedef enum deanon_validation {
  DEANON_VALIDATE_STRICT = 0,
  DEANON_VALIDATE_GENERATION_ONLY = 1
} deanon_validation;

typedef enum deanon_match_mode {
  DEANON_MATCH_EXACT = 0,
  DEANON_MATCH_LOCAL = 1
} deanon_match_mode;

typedef struct deanon_match_options {
  deanon_match_mode mode;
  int restarts;        /* local search only */
  uint64_t seed;       /* local search only */
  int unweighted;      /* nonzero: unit weights instead of MAP weights */
  double budget;       /* exact only; <= 0 selects the default of 1e8 */
} deanon_match_options;

typedef struct deanon_bounds_options {
  int64_t n_z;
  int64_t n_t;
  double p;
  double q;
  double s;
  uint64_t trials;     /* 0: analytic bound only */
  uint64_t seed;
} deanon_bounds_options;

DEANON_API const char *deanon_version(void);
DEANON_API const char *deanon_last_error(void);
DEANON_API const char *deanon_status_name(deanon_status status);
DEANON_API void deanon_string_free(char *str);

/* Model parameters. */
DEANON_API deanon_status deanon_params_from_json(const char *json, deanon_validation mode,
                                                 deanon_params **out);
DEANON_API deanon_status deanon_params_to_json(const deanon_params *params, char **out_json);
DEANON_API int deanon_params_node_count(const deanon_params *params);
DEANON_API void deanon_params_free(deanon_params *params);

/* Mismatch weight for one block; +inf when s == 1. */
DEANON_API deanon_status deanon_mismatch_weight(double p, double s, double *out);

/* Instances: ground truth, public graph, anonymized graph and hidden matching. */
DEANON_API deanon_status deanon_instance_generate(const deanon_params *params, uint64_t seed,
                                                  deanon_instance **out);
DEANON_API deanon_status deanon_instance_from_json(const char *json, deanon_instance **out);
DEANON_API deanon_status deanon_instance_to_json(const deanon_instance *instance, char **out_json);
DEANON_API int deanon_instance_node_count(const deanon_instance *instance);
/* Copies the hidden matching into `forward` (capacity `len` >= node count). */
DEANON_API deanon_status deanon_instance_truth(const deanon_instance *instance, int *forward, size_t len);
DEANON_API void deanon_instance_free(deanon_instance *instance);

/* Cost of `matching_json` (a JSON array of g2 labels indexed by g1 label). */
DEANON_API deanon_status deanon_cost(const deanon_instance *instance, const char *matching_json,
                                     int unweighted, char **out_json);

/* Best matching plus its success report against the bundled truth, as JSON. */
DEANON_API deanon_status deanon_match(const deanon_instance *instance,
                                      const deanon_match_options *options, char **out_json);

/* Threshold report and expected-count union bound for k <= 2 params, as JSON. */
DEANON_API deanon_status deanon_theory(const deanon_params *params, char **out_json);

/* Chernoff bound and optional Monte Carlo tail estimate, as JSON. */
DEANON_API deanon_status deanon_bounds(const deanon_bounds_options *options, char **out_json);

/* Experiment harness. Config is JSON (see README). */
DEANON_API deanon_status deanon_experiment(const char *config_json, char **out_csv, char **out_summary_json);
DEANON_API deanon_status deanon_compare(const char *config_json, char **out_json);
DEANON_API deanon_status deanon_phase(const char *config_json, const char *axis, char **out_csv);

#ifdef __cplusplus
}
#endif

#endif /* DEANON_H */
