#ifndef TUBELAB_H
#define TUBELAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_UTF8 = 2,
  TL_STATUS_CONFIG = 3,
  TL_STATUS_PARAMETER = 4,
  TL_STATUS_DOMAIN = 5,
  TL_STATUS_CONJUGATE_POINT = 6,
  TL_STATUS_SELF_FOCUS = 7,
  TL_STATUS_NUMERICAL = 8,
  TL_STATUS_UNSUPPORTED = 9,
  TL_STATUS_IO = 10,
  TL_STATUS_PANIC = 11,
} TlStatus;

/**
 * A geometry: chart metric plus, for built-ins, its description.
 */
typedef struct TlSpace TlSpace;

/**
 * `g(x)` callback: writes the row-major `n × n` metric at `x` into `out`,
 * returns 0 on success.
 */
typedef int (*TlMetricFn)(const double *x, size_t n, double *out, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Built-in space by alias (`"h3"`, `"dr21"`, …) or by a JSON description.
 *
 * # Safety
 * `description` must be a NUL-terminated string; `out` must be writable.
 */
enum TlStatus tl_space_from_json(const char *description, struct TlSpace **out);

/**
 * Space from a metric callback on the box `[lower, upper]` with base point `center`.
 *
 * The callback may be called concurrently from several threads and must stay
 * valid, together with `user_data`, until the space is freed. A nonzero
 * return marks the point as outside the domain.
 *
 * # Safety
 * `lower`, `upper` and `center` must point to `n` doubles; `out` must be writable.
 */
enum TlStatus tl_space_from_callback(size_t n,
                                     TlMetricFn metric,
                                     void *user_data,
                                     double scale,
                                     const double *lower,
                                     const double *upper,
                                     const double *center,
                                     struct TlSpace **out);

/**
 * # Safety
 * `space` must come from a `tl_space_*` constructor and not be used afterwards.
 */
void tl_space_free(struct TlSpace *space);

/**
 * Manifold dimension, 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t tl_space_dim(const struct TlSpace *space);

/**
 * Writes the chart's base point into `out` (`n` doubles).
 *
 * # Safety
 * `out` must point to `n` writable doubles.
 */
enum TlStatus tl_space_center(const struct TlSpace *space, double *out, size_t n);

/**
 * `θ(v)` for `v ∈ T_pM`.
 *
 * # Safety
 * `point` and `v` must point to `n` doubles; `out` must be writable.
 */
enum TlStatus tl_theta(const struct TlSpace *space,
                       const double *point,
                       const double *v,
                       size_t n,
                       double *out);

/**
 * Mean curvature of the geodesic sphere of radius `‖v‖` about `p` at `exp_p(v)`.
 *
 * # Safety
 * As for [`tl_theta`].
 */
enum TlStatus tl_sphere_mean_curvature(const struct TlSpace *space,
                                       const double *point,
                                       const double *v,
                                       size_t n,
                                       double *out);

/**
 * `ι(v) = −γ_v′(1)`, written as base point and components.
 *
 * # Safety
 * `point` and `v` must point to `n` doubles; `out_point` and `out_v` to `n` writable doubles.
 */
enum TlStatus tl_geodesic_involution(const struct TlSpace *space,
                                     const double *point,
                                     const double *v,
                                     size_t n,
                                     double *out_point,
                                     double *out_v);

/**
 * Closed-form radial density `θ̄(r)` of a harmonic built-in.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
enum TlStatus tl_closed_form_profile(const struct TlSpace *space, double r, double *out);

/**
 * Volume of the radius-`r` tube about the unit-speed geodesic from `point`
 * along `direction` of the given length, with its error estimate.
 *
 * # Safety
 * `point` and `direction` must point to `n` doubles; `value` and `error` must be writable.
 */
enum TlStatus tl_tube_volume(const struct TlSpace *space,
                             const double *point,
                             const double *direction,
                             size_t n,
                             double length,
                             double r,
                             double *value,
                             double *error);

/**
 * Runs an experiment config; writes the CSV report and the CLI exit code.
 *
 * # Safety
 * `config_json` must be NUL-terminated; `out_csv` and `exit_code` must be writable.
 * The report string is released with [`tl_string_free`].
 */
enum TlStatus tl_run_config(const char *config_json, char **out_csv, int *exit_code);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void tl_string_free(char *s);

/**
 * Message of the last failed call on this thread; valid until the next call.
 */
const char *tl_last_error_message(void);

/**
 * Library version, static.
 */
const char *tl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUBELAB_H */
