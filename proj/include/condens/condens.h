#ifndef CONDENS_H
#define CONDENS_H

#include <stddef.h>
#include <stdint.h>

#if defined(CONDENS_BUILDING)
#define CONDENS_API __attribute__((visibility("default")))
#else
#define CONDENS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum condens_status {
    CONDENS_OK = 0,
    CONDENS_E_CONTRACT = 1,  /* bad argument, shape or configuration */
    CONDENS_E_DOMAIN = 2,    /* argument outside the domain of a function */
    CONDENS_E_NUMERICAL = 3, /* degenerate moments, rank deficiency, ... */
    CONDENS_E_ESTIMATION = 4,
    CONDENS_E_INTERNAL = 5
} condens_status;

typedef enum condens_convention { CONDENS_PER_COMPONENT = 0, CONDENS_TOTAL = 1 } condens_convention;
typedef enum condens_kind { CONDENS_SMOOTHED = 0, CONDENS_EXACT = 1 } condens_kind;
typedef enum condens_path { CONDENS_FAST = 0, CONDENS_DIRECT = 1 } condens_path;

typedef struct condens_grid {
    double x0;
    double y0;
    double delta;
    size_t m;
} condens_grid;

typedef struct condens_series condens_series;
typedef struct condens_field condens_field;
typedef struct condens_estimate condens_estimate;

/* Message of the last failed call on this thread; never NULL. */
CONDENS_API const char* condens_last_error(void);
CONDENS_API const char* condens_version(void);

/* 0 restores the default worker count. */
CONDENS_API void condens_set_threads(unsigned count);

/* Complex arrays are interleaved (re, im) pairs throughout. */

/* s_k = sum_j c_j xi_j^k for k < n; out holds 2n doubles. */
CONDENS_API condens_status condens_synth(const double* c, const double* xi, size_t p, size_t n, double* out);
/* The five-component reference model; c and xi hold 10 doubles each. */
CONDENS_API void condens_reference_model(double* c, double* xi);

CONDENS_API condens_status condens_series_create(const double* a, size_t n, double sigma,
                                                 condens_convention convention, condens_series** out);
/* s plus noise drawn from a generator seeded with `seed`. */
CONDENS_API condens_status condens_series_noisy(const double* s, size_t n, double sigma,
                                                condens_convention convention, uint64_t seed,
                                                condens_series** out);
CONDENS_API void condens_series_destroy(condens_series* series);
CONDENS_API size_t condens_series_length(const condens_series* series);
CONDENS_API condens_status condens_series_values(const condens_series* series, double* out);

/* |R_kk(z)|^2, k = 1..n/2, written to out. */
CONDENS_API condens_status condens_rkk_profile(const condens_series* series, double z_re, double z_im,
                                               condens_path path, double* out);

/* Density from the potential averaged over `count` series of equal length. */
CONDENS_API condens_status condens_density(const condens_series* const* series, size_t count,
                                           const condens_grid* grid, double sigma, double beta,
                                           condens_kind kind, condens_field** out);
CONDENS_API void condens_field_destroy(condens_field* field);
CONDENS_API condens_status condens_field_grid(const condens_field* field, condens_grid* grid);
/* (m-2)^2 interior density values, x fastest. */
CONDENS_API condens_status condens_field_density(const condens_field* field, double* out);
/* m^2 potential values, x fastest. */
CONDENS_API condens_status condens_field_potential(const condens_field* field, double* out);
CONDENS_API double condens_field_mass(const condens_field* field);

/* p_hat = 0 selects the order automatically. */
CONDENS_API condens_status condens_estimate_run(const condens_field* field, const condens_series* series,
                                                size_t p_hat, condens_estimate** out);
CONDENS_API void condens_estimate_destroy(condens_estimate* est);
CONDENS_API size_t condens_estimate_order(const condens_estimate* est);
/* xi and c hold 2 * order doubles. */
CONDENS_API condens_status condens_estimate_params(const condens_estimate* est, double* xi, double* c);
CONDENS_API double condens_estimate_residual(const condens_estimate* est);
CONDENS_API int condens_estimate_significant(const condens_estimate* est);

/* E[log y] of the Gamma(shape alpha, scale beta) law. */
CONDENS_API condens_status condens_elog_gamma(double alpha, double beta, double* out);

/* Runs a pipeline command (synth, density, estimate, reconstruct, validate,
 * bench) from a JSON configuration. On success *report receives a JSON
 * string to release with condens_string_free. */
CONDENS_API condens_status condens_run(const char* command, const char* config_json, char** report);
CONDENS_API void condens_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
