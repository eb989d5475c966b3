// Copyright 2026 The heatleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the heatleak library.
 *
 * Objects are opaque handles created by hl_*_create / hl_*_load and released
 * with the matching hl_*_free. Every fallible call returns an hl_status; on
 * failure, hl_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * hl_string_free.
 */
#ifndef HEATLEAK_H
#define HEATLEAK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HL_API __declspec(dllexport)
#else
#define HL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
  HL_OK = 0,
  HL_ERR_INVALID_ARGUMENT = 1,
  HL_ERR_DOMAIN = 2,
  HL_ERR_IO = 3,
  HL_ERR_PARSE = 4,
  HL_ERR_INTERNAL = 5
} hl_status;

typedef enum hl_variant { HL_VARIANT_A = 0, HL_VARIANT_B = 1 } hl_variant;

typedef enum hl_stage { HL_STAGE_I = 0, HL_STAGE_II = 1, HL_STAGE_III = 2 } hl_stage;

typedef struct hl_config hl_config;
typedef struct hl_verdict hl_verdict;

typedef struct hl_threshold {
  const char* test;       /* "global-passivity" or "deformation" */
  const char* stage_pair; /* "ii_vs_i" or "iii_vs_i" */
  int has_estimate;       /* 0 when the point-estimate sweep never crosses zero */
  double value;
  double ci_low;
  double ci_high;
  double std_error;
  size_t resamples;
  size_t resamples_without_crossing;
} hl_threshold;

typedef struct hl_bounds {
  double xi_min; /* -INFINITY when unbounded */
  double xi_max; /* +INFINITY when unbounded */
} hl_bounds;

HL_API const char* hl_version(void);
HL_API const char* hl_last_error(void);
HL_API void hl_string_free(char* s);

/* ---- configuration ---- */

/* Published parameters for the chosen variant. */
HL_API hl_status hl_config_create(hl_variant variant, int include_env_swap, hl_config** out);
HL_API hl_status hl_config_load(const char* path, hl_config** out);
HL_API hl_status hl_config_from_json(const char* json, hl_config** out);
/* Configuration echoed in the header line of a shot-record file. */
HL_API hl_status hl_config_from_records(const char* records_path, hl_config** out);
HL_API void hl_config_free(hl_config* config);
HL_API hl_status hl_config_to_json(const hl_config* config, char** out_json);

HL_API hl_status hl_config_set_seed(hl_config* config, uint64_t seed);
HL_API hl_status hl_config_set_significance(hl_config* config, double sigma);
HL_API hl_status hl_config_set_epsilon(hl_config* config, double epsilon);
HL_API hl_status hl_config_set_spam(hl_config* config, double flip_0_to_1, double flip_1_to_0);
HL_API hl_status hl_config_set_out_dir(hl_config* config, const char* dir);
HL_API hl_status hl_config_set_shots_per_stage(hl_config* config, uint64_t shots);
HL_API hl_status hl_config_set_env_swap(hl_config* config, int include_env_swap);
HL_API hl_status hl_config_set_resamples(hl_config* config, size_t resamples);
HL_API hl_status hl_config_get_out_dir(const hl_config* config, char** out_dir);

/* ---- exact evaluation ---- */

/* Exact (c, h) outcome distribution at a stage, 4 entries in order 00 01 10 11. */
HL_API hl_status hl_stage_distribution(const hl_config* config, hl_stage stage, double out[4]);

/* Writes exact theory sweeps to out_dir (NULL: the configured out_dir). */
HL_API hl_status hl_exact(const hl_config* config, const char* out_dir);

/* ---- finite-shot pipeline ---- */

HL_API hl_status hl_simulate(const hl_config* config, const char* records_path);

/* Analyzes a record file; writes sweeps and verdict.json to out_dir (NULL: the
 * configured out_dir). *out may be NULL if the verdict is not needed. */
HL_API hl_status hl_analyze(const hl_config* config, const char* records_path,
                            const char* out_dir, hl_verdict** out);

HL_API void hl_verdict_free(hl_verdict* verdict);
HL_API int hl_verdict_detected(const hl_verdict* verdict);
HL_API const char* hl_verdict_channel(const hl_verdict* verdict);
HL_API double hl_verdict_strength(const hl_verdict* verdict);
HL_API size_t hl_verdict_threshold_count(const hl_verdict* verdict);
HL_API hl_status hl_verdict_threshold(const hl_verdict* verdict, size_t index, hl_threshold* out);
HL_API hl_status hl_verdict_to_json(const hl_verdict* verdict, char** out_json);

/* ---- passivity primitives ---- */

/* Admissible deformation range for diagonal B and A given on n outcomes. */
HL_API hl_status hl_deformation_bounds(const double* b_values, const double* a_values, size_t n,
                                       hl_bounds* out);

/* Bounds for B = beta_c H_c + beta_h H_h with A = H_c or H_h (observable "c"
 * or "h") or the identity ("const"). *binding receives a human-readable
 * description of the outcome pairs that set each bound (may be NULL). */
HL_API hl_status hl_bounds_for_betas(double beta_c, double beta_h, const char* observable,
                                     hl_bounds* out, char** binding);

/* <B^alpha>_final - <B^alpha>_initial over 2^n_betas outcomes. */
HL_API hl_status hl_delta_b_alpha(const double* initial, const double* final_dist,
                                  const double* betas, size_t n_betas, double epsilon,
                                  double alpha, double* out);

#ifdef __cplusplus
}
#endif

#endif /* HEATLEAK_H */
