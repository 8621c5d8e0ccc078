// SPDX-License-Identifier: Apache-2.0
//
// rsris - statistical-CSI rate splitting with RIS phase optimization
// Copyright (C) 2026 The rsris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RSRIS_RSRIS_H
#define RSRIS_RSRIS_H

#include <stddef.h>
#include <stdint.h>

#if defined(RSRIS_BUILDING_LIBRARY)
#define RSRIS_API __attribute__((visibility("default")))
#else
#define RSRIS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning rsris_status stores a message
   retrievable with rsris_last_error() (per thread) when it fails. */
typedef enum rsris_status {
  RSRIS_OK = 0,
  RSRIS_E_INVALID_ARGUMENT = 2, /* bad parameter or out-of-range value */
  RSRIS_E_IO = 3,               /* file could not be read or written */
  RSRIS_E_PARSE = 4,            /* malformed scenario, plan or matrix file */
  RSRIS_E_INVARIANT = 5,        /* statistics violate Hermitian/PSD/dimension checks */
  RSRIS_E_DEGENERATE = 6,       /* optimizer reached a degenerate state */
  RSRIS_E_NO_CONVERGENCE = 7,   /* eigenvector iteration did not converge */
  RSRIS_E_INTERNAL = 8          /* unexpected failure */
} rsris_status;

typedef struct rsris_scenario rsris_scenario;
typedef struct rsris_stats rsris_stats;
typedef struct rsris_solution rsris_solution;
typedef struct rsris_plan rsris_plan;
typedef struct rsris_results rsris_results;

RSRIS_API const char* rsris_version(void);
RSRIS_API const char* rsris_last_error(void);
RSRIS_API const char* rsris_status_string(rsris_status status);

/* Scenarios (JSON) */
RSRIS_API rsris_status rsris_scenario_load(const char* path, rsris_scenario** out);
RSRIS_API void rsris_scenario_free(rsris_scenario* s);
RSRIS_API rsris_status rsris_scenario_set_seed(rsris_scenario* s, uint64_t seed);
/* *has_pt is set to 0 when the scenario carries no Pt_dB. */
RSRIS_API rsris_status rsris_scenario_pt_dB(const rsris_scenario* s, double* pt_dB, int* has_pt);

/* Channel statistics */
RSRIS_API rsris_status rsris_stats_synthesize(const rsris_scenario* s, rsris_stats** out);
/* Loads a matrix file without validating it. */
RSRIS_API rsris_status rsris_stats_load(const char* path, rsris_stats** out);
RSRIS_API rsris_status rsris_stats_save(const rsris_stats* st, const char* path);
RSRIS_API rsris_status rsris_stats_validate(const rsris_stats* st);
/* Copy with the RIS removed (N = 0). */
RSRIS_API rsris_status rsris_stats_without_ris(const rsris_stats* st, rsris_stats** out);
RSRIS_API rsris_status rsris_stats_dims(const rsris_stats* st, int* M, int* K, int* N);
RSRIS_API void rsris_stats_free(rsris_stats* st);

/* Statistical-CSI optimizer */
typedef struct rsris_optimizer_config {
  double pt_dB;
  int max_iters;
  double rel_tol;
  int rate_splitting; /* nonzero: common stream enabled */
  int phase_update;   /* nonzero: RIS phases optimized */
  int trace;          /* nonzero: record per-iteration diagnostics */
  int pi_max_iters;   /* power-iteration budget of the phase step */
  double pi_tol;      /* power-iteration residual tolerance (relative) */
} rsris_optimizer_config;

RSRIS_API void rsris_optimizer_config_default(rsris_optimizer_config* cfg);
RSRIS_API rsris_status rsris_optimize(const rsris_stats* st, const rsris_optimizer_config* cfg,
                                      rsris_solution** out);
/* Optimizes on the statistics drawn from the scenario's seed with the trace on. */
RSRIS_API rsris_status rsris_converge(const rsris_scenario* s, const rsris_optimizer_config* cfg,
                                      rsris_solution** out);

typedef struct rsris_rate_summary {
  double sum_rate;     /* bits per channel use */
  double private_rate; /* sum over users */
  double common_rate;  /* rate of the selected (worst) user */
  int common_user;
  int iterations;
} rsris_rate_summary;

RSRIS_API rsris_status rsris_solution_summary(const rsris_solution* sol, rsris_rate_summary* out);
/* Monte Carlo ergodic sum rate of the solution over n channel draws. */
RSRIS_API rsris_status rsris_solution_ergodic_rate(const rsris_solution* sol, const rsris_stats* st, int n,
                                                   uint64_t seed, double* mean, double* std_error);
RSRIS_API size_t rsris_solution_trace_length(const rsris_solution* sol);
/* Trace as CSV: iteration,fp_objective,sum_rate_bits,k_opt_precoder,k_opt_phase,power_residual */
RSRIS_API rsris_status rsris_solution_write_trace(const rsris_solution* sol, const char* path);
/* Phases as interleaved re/im pairs; buf must hold 2 * N doubles. */
RSRIS_API rsris_status rsris_solution_phases(const rsris_solution* sol, double* buf, size_t n_doubles);
RSRIS_API void rsris_solution_free(rsris_solution* sol);

/* Experiment plans (JSON) */
RSRIS_API rsris_status rsris_plan_load(const char* path, rsris_plan** out);
RSRIS_API rsris_status rsris_plan_set_master_seed(rsris_plan* p, uint64_t seed);
RSRIS_API rsris_status rsris_plan_set_pt_grid(rsris_plan* p, const double* pt_dB, size_t n);
RSRIS_API rsris_status rsris_plan_set_optimizer(rsris_plan* p, int max_iters, double rel_tol);
/* Comma-separated variant labels such as "stat:RS:OptRIS,stat:noRS:RandRIS". */
RSRIS_API rsris_status rsris_plan_set_variants(rsris_plan* p, const char* variants);
RSRIS_API void rsris_plan_free(rsris_plan* p);

/* Runs every (variant, Pt, covariance realization) cell. Results do not
   depend on the worker count. timing = 0 writes zero wall times. */
RSRIS_API rsris_status rsris_plan_run(const rsris_plan* p, int workers, int timing, rsris_results** out);
RSRIS_API size_t rsris_results_rows(const rsris_results* r);

typedef struct rsris_result_row {
  const char* variant; /* valid while the results handle lives */
  double pt_dB;
  double mean;
  double std_error;
  double mean_iterations;
  double seconds;
  int completed;
  int failed;
} rsris_result_row;

RSRIS_API rsris_status rsris_results_row(const rsris_results* r, size_t index, rsris_result_row* out);
RSRIS_API size_t rsris_results_failures(const rsris_results* r);
RSRIS_API rsris_status rsris_results_write_csv(const rsris_results* r, const char* path);
RSRIS_API rsris_status rsris_results_write_manifest(const rsris_results* r, const char* path);
RSRIS_API void rsris_results_free(rsris_results* r);

#ifdef __cplusplus
}
#endif

#endif /* RSRIS_RSRIS_H */
