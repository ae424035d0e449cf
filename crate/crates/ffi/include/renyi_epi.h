#ifndef RENYI_EPI_H
#define RENYI_EPI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum ReStatus {
  RE_STATUS_OK = 0,
  RE_STATUS_NULL_POINTER = 1,
  RE_STATUS_INVALID_UTF8 = 2,
  RE_STATUS_DOMAIN = 3,
  RE_STATUS_INVALID_DENSITY = 4,
  RE_STATUS_INVALID_GRID = 5,
  RE_STATUS_TRUNCATION = 6,
  RE_STATUS_SPACING_MISMATCH = 7,
  RE_STATUS_NUMERICAL = 8,
  RE_STATUS_NOT_DIFFERENTIABLE = 9,
  RE_STATUS_INADMISSIBLE = 10,
  RE_STATUS_PARSE = 11,
  RE_STATUS_IO = 12,
  RE_STATUS_PANIC = 99,
} ReStatus;

/**
 * Opaque analytic density.
 */
typedef struct ReDensity ReDensity;

/**
 * Opaque sampled density.
 */
typedef struct ReGrid ReGrid;

/**
 * Outcome of an inequality check: `holds` is `slack >= -tol`.
 */
typedef struct ReInequalityReport {
  double lhs;
  double rhs;
  double slack;
  double tol;
  bool holds;
} ReInequalityReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *re_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *re_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void re_string_free(char *s);

/**
 * Parses a density such as `gaussian:1`, `uniform:0,1@2,0` or `beta`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum ReStatus re_density_parse(const char *text, struct ReDensity **out);

/**
 * # Safety
 * `d` must come from [`re_density_parse`] and not have been freed.
 */
void re_density_free(struct ReDensity *d);

/**
 * Canonical text form of a density; release with [`re_string_free`].
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum ReStatus re_density_to_string(const struct ReDensity *d, char **out);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum ReStatus re_density_eval(const struct ReDensity *d, double x, double *out);

/**
 * Entropy power `N_r` from closed forms. `r = 1` is Shannon and
 * `r = INFINITY` the sup order.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum ReStatus re_density_renyi_power(const struct ReDensity *d, double r, double *out);

/**
 * Samples a density with `grid_n` points across its default window.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum ReStatus re_density_discretize(const struct ReDensity *d,
                                    size_t grid_n,
                                    double window_factor,
                                    struct ReGrid **out);

/**
 * Builds a grid from `len` samples at `x0 + i·dx`, renormalized to unit mass.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum ReStatus re_grid_new(double x0,
                          double dx,
                          const double *values,
                          size_t len,
                          struct ReGrid **out);

/**
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void re_grid_free(struct ReGrid *g);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t re_grid_len(const struct ReGrid *g);

/**
 * # Safety
 * `g` must be a live handle; `x0` and `dx` must be writable.
 */
enum ReStatus re_grid_geometry(const struct ReGrid *g, double *x0, double *dx);

/**
 * Borrowed pointer to the samples, valid while the handle lives.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
const double *re_grid_values(const struct ReGrid *g);

/**
 * Density of the sum of independent variables with grids `a` and `b`,
 * which must share a spacing.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum ReStatus re_grid_convolve(const struct ReGrid *a, const struct ReGrid *b, struct ReGrid **out);

/**
 * Entropy power of a grid by quadrature; orders as in
 * [`re_density_renyi_power`].
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum ReStatus re_grid_renyi_power(const struct ReGrid *g, double r, double *out);

/**
 * `N_r(X+Y)^α ≥ N_r(X)^α + N_r(Y)^α` with the sum convolved on a grid.
 *
 * # Safety
 * `x`, `y` must be live handles; `out` must be writable.
 */
enum ReStatus re_epi_check(const struct ReDensity *x,
                           const struct ReDensity *y,
                           double r,
                           double alpha,
                           size_t grid_n,
                           double window_factor,
                           struct ReInequalityReport *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ReStatus re_a_r(double r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ReStatus re_alpha_of_r(double r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ReStatus re_g_criterion(double p, double r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ReStatus re_log_gamma(double x, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ReStatus re_digamma(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RENYI_EPI_H */
