// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef EDA_EDA_H
#define EDA_EDA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(EDA_BUILDING_LIBRARY)
#define EDA_API __declspec(dllexport)
#else
#define EDA_API __declspec(dllimport)
#endif
#else
#define EDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eda_status {
  EDA_OK = 0,
  EDA_ERR_INVALID_ARGUMENT = 1,
  EDA_ERR_SHAPE_MISMATCH = 2,
  EDA_ERR_DOMAIN = 3,
  EDA_ERR_SINGULAR_COVARIANCE = 4,
  EDA_ERR_NUMERICAL = 5,
  EDA_ERR_IO = 6,
  EDA_ERR_PARSE = 7,
  EDA_ERR_CHECK_FAILED = 8,
  EDA_ERR_INTERNAL = 9
} eda_status;

typedef struct eda_field eda_field;
typedef struct eda_schedule eda_schedule;
typedef struct eda_basis eda_basis;
typedef struct eda_process eda_process;
typedef struct eda_config eda_config;
typedef struct eda_report eda_report;

EDA_API const char* eda_version(void);
EDA_API const char* eda_status_string(eda_status status);
/* Message of the last failed call on the calling thread ("" if none). */
EDA_API const char* eda_last_error(void);

/* Fields. `values` may be NULL for a zero field. */
EDA_API eda_status eda_field_create(const size_t* shape, size_t rank, const double* values,
                                    eda_field** out);
EDA_API void eda_field_destroy(eda_field* field);
EDA_API size_t eda_field_rank(const eda_field* field);
EDA_API size_t eda_field_size(const eda_field* field);
EDA_API eda_status eda_field_shape(const eda_field* field, size_t* extents, size_t capacity);
EDA_API const double* eda_field_data(const eda_field* field);
EDA_API eda_status eda_field_save(const eda_field* field, const char* path);
EDA_API eda_status eda_field_load(const char* path, eda_field** out);
EDA_API eda_status eda_psnr(const eda_field* a, const eda_field* b, double peak, double* out);
EDA_API eda_status eda_rmse(const eda_field* a, const eda_field* b, double* out);

/* Schedules: kind is "vp" or "ddpm". */
EDA_API eda_status eda_schedule_create(const char* kind, double beta_min, double beta_max,
                                       double horizon, eda_schedule** out);
EDA_API void eda_schedule_destroy(eda_schedule* schedule);
EDA_API eda_status eda_schedule_evaluate(const eda_schedule* schedule, double t, double* s,
                                         double* s_prime, double* sigma, double* sigma_prime);

/* Basis sets. */
EDA_API eda_status eda_basis_create_pixel(const size_t* shape, size_t rank, eda_basis** out);
EDA_API eda_status eda_basis_create_legendre_trig(int n1, int n2, size_t rows, size_t cols,
                                                  eda_basis** out);
EDA_API eda_status eda_basis_create_residual(const size_t* shape, size_t rank, eda_basis** out);
/* `elements` holds `count` consecutive fields of the given shape. */
EDA_API eda_status eda_basis_create_fixed(const size_t* shape, size_t rank, const double* elements,
                                          size_t count, eda_basis** out);
EDA_API void eda_basis_destroy(eda_basis* basis);
EDA_API size_t eda_basis_count(const eda_basis* basis);

/* Diffusion processes. clean/degraded are required for the residual basis
   and ignored otherwise (pass NULL). */
EDA_API eda_status eda_process_create(const eda_schedule* schedule, const eda_basis* basis,
                                      double eta, eda_process** out);
EDA_API void eda_process_destroy(eda_process* process);
EDA_API eda_status eda_process_forward_sample(const eda_process* process, const eda_field* x0,
                                              double t, const eda_field* clean,
                                              const eda_field* degraded, uint64_t seed,
                                              eda_field** out);
EDA_API eda_status eda_process_conditional_score(const eda_process* process, const eda_field* x0,
                                                 double t, const eda_field* x, eda_field** out);
EDA_API eda_status eda_process_pfode_rhs(const eda_process* process, const eda_field* x0, double t,
                                         const eda_field* x, eda_field** out);

/* Experiment configs: JSON file plus "a.b=value" overrides. */
EDA_API eda_status eda_config_load(const char* path, const char* const* overrides, size_t count,
                                   eda_config** out);
EDA_API eda_status eda_config_default(const char* const* overrides, size_t count,
                                      eda_config** out);
EDA_API void eda_config_destroy(eda_config* config);
EDA_API uint64_t eda_config_seed(const eda_config* config);

/* Runs train | sample | restore | simulate | demo-case3. Progress goes to
   stderr; `exit_code` receives the command's process exit code. */
EDA_API eda_status eda_run_command(const char* command, const eda_config* config, int* exit_code);

/* Verification suites. */
EDA_API eda_status eda_verify_run(const char* suite, uint64_t seed, eda_report** out);
EDA_API void eda_report_destroy(eda_report* report);
EDA_API int eda_report_passed(const eda_report* report);
EDA_API size_t eda_report_check_count(const eda_report* report);
EDA_API const char* eda_report_json(const eda_report* report);

#ifdef __cplusplus
}
#endif

#endif
