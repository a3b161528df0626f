#ifndef NULLFOL_NULLFOL_H
#define NULLFOL_NULLFOL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NF_API __declspec(dllexport)
#else
#define NF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns NF_OK or one of the error codes below; the message of the
   last failure on the calling thread is available from nf_last_error(). */
typedef enum nf_status {
  NF_OK = 0,
  NF_ERR_DOMAIN = 1,
  NF_ERR_NO_CONVERGENCE = 2,
  NF_ERR_PROFILE = 3,
  NF_ERR_GRID_MISMATCH = 4,
  NF_ERR_NOT_MEAN_ZERO = 5,
  NF_ERR_UNSUPPORTED_ORDER = 6,
  NF_ERR_OUT_OF_DOMAIN = 7,
  NF_ERR_STEP_REJECTED = 8,
  NF_ERR_LOCKSTEP = 9,
  NF_ERR_OFF_GRID_EVAL = 10,
  NF_ERR_NON_DIFFEO = 11,
  NF_ERR_HYPOTHESIS = 12,
  NF_ERR_ENSEMBLE_INCOMPLETE = 13,
  NF_ERR_CONFIG = 14,
  NF_ERR_IO = 15,
  NF_ERR_INVALID_ARGUMENT = 100,
  NF_ERR_INTERNAL = 101
} nf_status;

typedef struct nf_config nf_config;
typedef struct nf_grid nf_grid;
typedef struct nf_metric nf_metric;
typedef struct nf_field nf_field;
typedef struct nf_trajectory nf_trajectory;

NF_API const char* nf_version(void);
NF_API const char* nf_last_error(void);

/* run configuration (TOML subset) */
NF_API int nf_config_default(nf_config** out);
NF_API int nf_config_load(const char* path, nf_config** out);
NF_API int nf_config_parse(const char* text, nf_config** out);
/* mode: evolve | perturb | linearize | gronwall | validate-metric | certify | sweep */
NF_API int nf_config_set_mode(nf_config* cfg, const char* mode);
/* value in TOML syntax; bare words are taken as strings. Short names epsilon,
   delta_o, delta_m, dd_o, dd_m, runs and seed are accepted besides dotted keys. */
NF_API int nf_config_set(nf_config* cfg, const char* key, const char* value);
NF_API int nf_config_set_string(nf_config* cfg, const char* key, const char* value);
NF_API int nf_config_set_seed(nf_config* cfg, uint64_t seed);
/* "key=a:step:b", "key=v" or "key=v1,v2" */
NF_API int nf_config_add_sweep_param(nf_config* cfg, const char* spec);
/* copies the resolved TOML into buf (NUL terminated when cap > 0); *needed gets the full length + 1 */
NF_API int nf_config_to_toml(const nf_config* cfg, char* buf, size_t cap, size_t* needed);
NF_API void nf_config_free(nf_config* cfg);

/* Runs the configured mode into its output directory. *exit_code receives
   0 (success), 2 (a foliation left the domain) or 3 (a check or certificate failed). */
NF_API int nf_run(const nf_config* cfg, int* exit_code);

/* Gauss-Legendre grid; coefficients are indexed l*l + l + m */
NF_API int nf_grid_create(int nlat, int nlon, int lmax, nf_grid** out);
NF_API int nf_grid_size(const nf_grid* g, int* nodes, int* ncoeff);
NF_API void nf_grid_free(nf_grid* g);

NF_API int nf_field_constant(const nf_grid* g, double value, nf_field** out);
NF_API int nf_field_from_coeffs(const nf_grid* g, const double* coeffs, int count, nf_field** out);
NF_API int nf_field_values(const nf_field* f, double* out, int cap);
NF_API int nf_field_coeffs(const nf_field* f, double* out, int cap);
NF_API void nf_field_free(nf_field* f);

/* perturbed family with a random profile of size epsilon (epsilon = 0: background) */
NF_API int nf_metric_create(const nf_grid* g, double r0, double kappa, double epsilon, uint64_t profile_seed,
                            nf_metric** out);
NF_API void nf_metric_free(nf_metric* m);

/* stretched RK4 steps h = h0 (r0 + s) / r0 capped at h_max, n = 2, p = 2 */
NF_API int nf_evolve(const nf_metric* m, const nf_field* f0, double s_end, double h0, double h_max,
                     nf_trajectory** out);
/* 0 completed, 1 boundary hit, 2 guard hit */
NF_API int nf_trajectory_status(const nf_trajectory* t, int* status);
NF_API int nf_trajectory_rows(const nf_trajectory* t, int* rows);
/* s, mean f, |grad f|^{3,2}, |lap f|^{2,2}, max|f|, null residual, sup|F|, step */
NF_API int nf_trajectory_row(const nf_trajectory* t, int i, double out[8]);
NF_API int nf_trajectory_final(const nf_trajectory* t, nf_field** out);
NF_API void nf_trajectory_free(nf_trajectory* t);

#ifdef __cplusplus
}
#endif

#endif
