/* coarcta: heart-rate-consistent boundary conditions for coarctation flow
 * modelling from Doppler echo velocity traces.
 *
 * C ABI of the shared library. All entry points return a coa_status; output
 * values are written through pointers. On failure, coa_last_error() returns
 * a human-readable message for the calling thread.
 */
#ifndef COARCTA_H
#define COARCTA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COARCTA_API __declspec(dllexport)
#else
#define COARCTA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coa_status {
  COA_OK = 0,
  COA_ERR_CONFIG = 1,  /* usage/config errors */
  COA_ERR_DATA = 2,    /* malformed or insufficient input data */
  COA_ERR_NUMERIC = 3, /* numeric failures (singular systems, ...) */
  COA_ERR_ARGUMENT = 4 /* null pointers, bad buffer sizes */
} coa_status;

/* Opaque handles. */
typedef struct coa_config coa_config;
typedef struct coa_model coa_model;

COARCTA_API const char* coa_version(void);

/* Message for the most recent failure on this thread ("" if none). */
COARCTA_API const char* coa_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* A config with default settings (output_dir must be set before use). */
COARCTA_API coa_status coa_config_create(coa_config** out);

/* Loads a key-value config file. */
COARCTA_API coa_status coa_config_load(const char* path, coa_config** out);

/* Applies one `key = value` setting (same keys as the config file). */
COARCTA_API coa_status coa_config_set(coa_config* config, const char* key,
                                      const char* value);

/* Serializes the full config; returns the length it wanted to write.
 * Pass buffer == NULL to query the required size (excluding the
 * terminating NUL). */
COARCTA_API coa_status coa_config_dump(const coa_config* config, char* buffer,
                                       size_t buffer_len, size_t* needed);

COARCTA_API void coa_config_free(coa_config* config);

/* ---- pipeline ---------------------------------------------------------- */

/* Runs one pipeline command: synth, ingest, train, evaluate, bcgen, oracle,
 * or report. */
COARCTA_API coa_status coa_run_command(const coa_config* config,
                                       const char* command);

/* ---- model artifacts ---------------------------------------------------- */

COARCTA_API coa_status coa_model_load(const char* path, coa_model** out);

/* Velocity profile over one cardiac period 60/heart_rate_bpm: n uniform
 * sample times and predicted velocities [m/s]. n must be 200 or 350; both
 * output buffers must hold n doubles. */
COARCTA_API coa_status coa_model_predict_profile(
    const coa_model* model, const char* vessel, const char* intervention_case,
    double heart_rate_bpm, size_t n, double* times_s_out,
    double* velocities_m_per_s_out);

COARCTA_API void coa_model_free(coa_model* model);

/* ---- direct numeric helpers --------------------------------------------- */

/* 60 / mean(successive peak intervals); needs >= 2 increasing peak times. */
COARCTA_API coa_status coa_estimate_heart_rate(const double* peak_times_s,
                                               size_t n_peaks,
                                               double* bpm_out);

/* Peak coarctation velocity from the descending-aorta mass flow:
 * v = mdot / (density * throat_area). */
COARCTA_API coa_status coa_coarct_velocity(double mdot_kg_per_s,
                                           double density_kg_per_m3,
                                           double throat_area_m2,
                                           double* velocity_m_per_s_out);

/* Clinical simplified Bernoulli pressure drop: 4 * v^2 [mmHg], v in m/s. */
COARCTA_API coa_status coa_simplified_bernoulli(double v_max_m_per_s,
                                                double* dp_mmHg_out);

/* 100 * |simulated - measured| / measured; measured must be positive. */
COARCTA_API coa_status coa_percent_error(double simulated, double measured,
                                         double* percent_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COARCTA_H */
