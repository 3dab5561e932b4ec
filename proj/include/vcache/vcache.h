// Copyright 2026 The vcache Authors
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

/* C interface to the vcache library. Every call returns a vc_status; the
 * message of the last failure on the calling thread is in vc_last_error().
 * Strings handed out by the library are released with vc_string_free. */

#ifndef VCACHE_VCACHE_H
#define VCACHE_VCACHE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VCACHE_BUILDING)
#    define VC_API __declspec(dllexport)
#  else
#    define VC_API __declspec(dllimport)
#  endif
#else
#  define VC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vc_status {
  VC_OK = 0,
  VC_STABILITY_VIOLATION = 1,
  VC_DOMAIN_ERROR = 2,
  VC_TRUNCATION_INSUFFICIENT = 3,
  VC_SINGULAR_SYSTEM = 4,
  VC_DIMENSION_MISMATCH = 5,
  VC_OUT_OF_RANGE = 6,
  VC_MISSING_STATE = 7,
  VC_INFEASIBLE_CAPACITY = 8,
  VC_NON_CONVERGENCE = 9,
  VC_PARSE_ERROR = 10,
  VC_VALIDATION_ERROR = 11,
  VC_IO_ERROR = 12,
  VC_INTERNAL = 13,
  VC_INVALID_ARGUMENT = 14,
  VC_PARTIAL_FAILURE = 15, /* some episodes or checks failed */
} vc_status;

typedef struct vc_experiment vc_experiment;

typedef struct vc_check_result {
  const char* label;
  const char* measured;
  int criterion;
  int pass;
  int informational;
  double tolerance;
  double seconds;
} vc_check_result;

typedef void (*vc_check_callback)(const vc_check_result* result, void* user);

VC_API const char* vc_version(void);
VC_API const char* vc_status_name(vc_status status);
VC_API const char* vc_last_error(void);
VC_API void vc_string_free(char* s);

VC_API vc_status vc_experiment_load(const char* path, vc_experiment** out);
VC_API vc_status vc_experiment_parse(const char* json_text, vc_experiment** out);
VC_API void vc_experiment_free(vc_experiment* exp);

/* Replaces any explicit seed list with seeds derived from this master seed. */
VC_API vc_status vc_experiment_set_seed(vc_experiment* exp, uint64_t seed);
VC_API vc_status vc_experiment_set_out_dir(vc_experiment* exp, const char* dir);
VC_API vc_status vc_experiment_set_emit_traces(vc_experiment* exp, int enabled);
VC_API vc_status vc_experiment_point_count(const vc_experiment* exp, size_t* points,
                                           size_t* replicates);

/* Runs every sweep point and replicate, then writes metrics.csv,
 * summary.csv and manifest.json to the output directory. Returns
 * VC_PARTIAL_FAILURE when some rows failed; their error column is filled. */
VC_API vc_status vc_experiment_run(vc_experiment* exp, unsigned threads, size_t* failed_rows);

VC_API vc_status vc_experiment_sweep_list(const vc_experiment* exp, char** listing);

/* Runs the checks of an expectations file against the experiment's base
 * scenario, reporting each through the callback. Returns VC_PARTIAL_FAILURE
 * when a non-informational check failed. */
VC_API vc_status vc_verify(const vc_experiment* exp, const char* expectations_path,
                           unsigned threads, vc_check_callback callback, void* user,
                           size_t* failed_checks);

VC_API vc_status vc_service_split(double lambda, double nu, double xi, double omega,
                                  double* kappa0, double* kappa1);
VC_API vc_status vc_expected_queue_lengths(double lambda, double nu, double xi, double omega,
                                           double* e_l0, double* e_l1);
VC_API vc_status vc_zipf(size_t n_fragments, double exponent, double* popularity);

/* Minimizes sum_j coeffs[j] * q[j] over 0 <= q <= 1 with
 * fragment_bits * sum_j q[j] <= capacity_bits. */
VC_API vc_status vc_solve_slot(size_t n_fragments, const double* coeffs, double fragment_bits,
                               double capacity_bits, double* q);

#ifdef __cplusplus
}
#endif

#endif /* VCACHE_VCACHE_H */
