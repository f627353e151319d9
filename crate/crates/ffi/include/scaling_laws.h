#ifndef SCALING_LAWS_H
#define SCALING_LAWS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_EMPTY_OBSERVATIONS = 3,
  SL_STATUS_UNDERDETERMINED = 4,
  SL_STATUS_UNREACHABLE = 5,
  SL_STATUS_NUMERICAL_FAILURE = 6,
  SL_STATUS_DEGENERATE_DESIGN = 7,
  SL_STATUS_SCHEMA = 8,
  SL_STATUS_IO = 9,
  SL_STATUS_UNKNOWN_FIXTURE = 10,
  SL_STATUS_NOT_CONVERGED = 11,
  SL_STATUS_PANIC = 12,
} SlStatus;

/**
 * Opaque result of a data-law fit.
 */
typedef struct SlFit SlFit;

/**
 * Opaque list of observation points.
 */
typedef struct SlPoints SlPoints;

typedef struct {
  double a;
  double alpha;
  double c_inf;
} SlDataLawParams;

/**
 * Fit configuration. Obtain defaults from [`sl_fit_options_default`].
 */
typedef struct {
  SlDataLawParams init;
  bool fix_c_inf_to_zero;
  double mse_stop;
  double step_stop;
  uint64_t max_iterations;
  uint64_t multi_start;
  uint64_t seed;
  /**
   * Weight residuals by `1 / std`; every point must then carry a std.
   */
  bool inverse_variance;
} SlFitOptions;

typedef struct {
  SlDataLawParams params;
  double sse;
  double mse;
  uint64_t iterations;
  bool converged;
} SlFitSummary;

typedef struct {
  double a;
  double alpha;
  double b;
  double beta;
  double c_inf;
} SlJointLawParams;

typedef struct {
  double eps0;
  double eta;
} SlEnvelopeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string after a successful call. The pointer stays valid until the next
 * call into this library from the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *sl_status_name(SlStatus status);

const char *sl_version(void);

/**
 * Empty observation list. Never NULL; release with [`sl_points_free`].
 */
SlPoints *sl_points_new(void);

/**
 * # Safety
 * `points` must be NULL or a handle returned by this library that has not
 * been freed yet.
 */
void sl_points_free(SlPoints *points);

/**
 * Appends a point. Pass a negative or NaN `std` when no spread is known.
 *
 * # Safety
 * `points` must be a live handle from [`sl_points_new`] or a loader.
 */
SlStatus sl_points_push(SlPoints *points, double n, double error, double std);

/**
 * Number of points held, or 0 for NULL.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t sl_points_len(const SlPoints *points);

/**
 * Copies point `index` into `n_out` / `error_out`.
 *
 * # Safety
 * `points` must be a live handle; the output pointers must be writable.
 */
SlStatus sl_points_get(const SlPoints *points, size_t index, double *n_out, double *error_out);

/**
 * Loads a built-in fixture (currently `"table1"`) into a new handle.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
SlStatus sl_points_from_fixture(const char *name, SlPoints **out);

/**
 * Reads an observation CSV into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
SlStatus sl_points_read_csv(const char *path, SlPoints **out);

/**
 * # Safety
 * `points` must be a live handle and `path` a NUL-terminated string.
 */
SlStatus sl_points_write_csv(const SlPoints *points, const char *path);

SlFitOptions sl_fit_options_default(void);

/**
 * Fits the data law. `options` may be NULL for defaults. A fit that stops
 * without converging still produces a handle (status `SL_STATUS_OK`); check
 * `converged` in its summary.
 *
 * # Safety
 * `points` must be a live handle, `options` NULL or readable, `out` writable.
 */
SlStatus sl_fit_data_law(const SlPoints *points, const SlFitOptions *options, SlFit **out);

/**
 * # Safety
 * `fit` must be a live handle and `out` writable.
 */
SlStatus sl_fit_summary(const SlFit *fit, SlFitSummary *out);

/**
 * Copies up to `capacity` residuals (`predicted - observed`, in sorted point
 * order) into `out` and stores the total count in `len_out`.
 *
 * # Safety
 * `fit` must be a live handle; `out` must hold `capacity` doubles (or be NULL
 * when `capacity` is 0); `len_out` must be writable.
 */
SlStatus sl_fit_residuals(const SlFit *fit, double *out, size_t capacity, size_t *len_out);

/**
 * # Safety
 * `fit` must be NULL or a live handle from [`sl_fit_data_law`].
 */
void sl_fit_free(SlFit *fit);

/**
 * # Safety
 * `params` must be readable and `out` writable.
 */
SlStatus sl_eval_data_law(const SlDataLawParams *params, double n, double *out);

/**
 * Dataset size at which the law reaches `target_error`.
 *
 * # Safety
 * `params` must be readable and `out` writable.
 */
SlStatus sl_invert_data_law(const SlDataLawParams *params, double target_error, double *out);

/**
 * # Safety
 * `params` must be readable and `out` writable.
 */
SlStatus sl_eval_joint_law(const SlJointLawParams *params, double m, double n, double *out);

/**
 * # Safety
 * `params` must be readable and `out` writable.
 */
SlStatus sl_envelope(double eps_tilde, const SlEnvelopeParams *params, double *out);

/**
 * Sum of squared residuals of `params` over `points`.
 *
 * # Safety
 * `params` and `points` must be readable and `out` writable.
 */
SlStatus sl_sse(const SlDataLawParams *params, const SlPoints *points, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCALING_LAWS_H */
