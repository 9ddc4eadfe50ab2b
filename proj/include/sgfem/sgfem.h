/* Copyright the sgfem authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the adaptive stochastic Galerkin solver. All functions return a status
 * code; on failure sgfem_last_error() describes the problem for the calling thread.
 * Strings returned through out-parameters are owned by the handle they came from.
 */

#ifndef SGFEM_SGFEM_H
#define SGFEM_SGFEM_H

#include <stddef.h>

#if defined(SGFEM_BUILDING_LIBRARY)
#define SGFEM_API __attribute__((visibility("default")))
#else
#define SGFEM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgfem_status {
  SGFEM_OK = 0,
  SGFEM_ERR_INPUT = 1,    /* invalid argument */
  SGFEM_ERR_NUMERIC = 2,  /* solver or root-finder failure */
  SGFEM_ERR_CONFIG = 3,   /* malformed or inconsistent configuration */
  SGFEM_ERR_IO = 4,
  SGFEM_ERR_LIMIT = 5,    /* resource cap or truncation exceeded */
  SGFEM_ERR_INTERNAL = 6
} sgfem_status;

typedef enum sgfem_decision {
  SGFEM_DECISION_NONE = 0,
  SGFEM_DECISION_SPATIAL = 1,
  SGFEM_DECISION_PARAMETRIC = 2
} sgfem_decision;

typedef struct sgfem_config sgfem_config;
typedef struct sgfem_result sgfem_result;

typedef struct sgfem_record {
  int iter;
  long long dofs;
  double mu;
  double zeta;
  double product;
  int n_elements;
  int card_P;
  int active_M;
  sgfem_decision decision;
  double goal_value;
  double rho_x;
  double rho_p;
} sgfem_record;

typedef struct sgfem_reference_info {
  double goal_value;
  long long dofs;
  int n_elements;
  int card_P;
} sgfem_reference_info;

SGFEM_API const char *sgfem_version(void);
SGFEM_API const char *sgfem_last_error(void);
SGFEM_API const char *sgfem_status_name(sgfem_status status);

SGFEM_API int sgfem_problem_count(void);
SGFEM_API sgfem_status sgfem_problem_name(int i, const char **name);

SGFEM_API sgfem_status sgfem_config_load(const char *path, sgfem_config **out);
SGFEM_API sgfem_status sgfem_config_parse(const char *json_text, sgfem_config **out);
/* Configuration as canonical JSON with defaults filled in. */
SGFEM_API sgfem_status sgfem_config_json(const sgfem_config *config, const char **text);
SGFEM_API void sgfem_config_free(sgfem_config *config);

/* Runs the adaptive loop and writes its artifacts. On failure partial artifacts remain. */
SGFEM_API sgfem_status sgfem_run(const sgfem_config *config, sgfem_result **out);
SGFEM_API void sgfem_result_free(sgfem_result *result);

SGFEM_API sgfem_status sgfem_result_status(const sgfem_result *result, const char **status);
SGFEM_API sgfem_status sgfem_result_output_dir(const sgfem_result *result, const char **dir);
SGFEM_API sgfem_status sgfem_result_count(const sgfem_result *result, int *count);
SGFEM_API sgfem_status sgfem_result_record(const sgfem_result *result, int i, sgfem_record *out);
/* Indices added by a parametric step, space separated, e.g. "(0 1) (2 0)"; empty otherwise. */
SGFEM_API sgfem_status sgfem_result_added(const sgfem_result *result, int i, const char **text);
SGFEM_API sgfem_status sgfem_result_total_dofs(const sgfem_result *result, long long *n_total);

/* Reference goal value for a finished run directory; writes reference.json and effectivity.csv. */
SGFEM_API sgfem_status sgfem_reference(const char *run_dir, sgfem_reference_info *out);

#ifdef __cplusplus
}
#endif

#endif /* SGFEM_SGFEM_H */
