#ifndef TELESCORE_H
#define TELESCORE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_OK = 0,
  TS_NULL_POINTER = 1,
  TS_INVALID_ARGUMENT = 2,
  TS_INVALID_MODEL = 3,
  TS_NUMERICAL = 4,
  TS_OUT_OF_RANGE = 5,
  TS_INVALID_UTF8 = 6,
  TS_PANIC = 7,
} TsStatus;

/**
 * A parsed noise model.
 */
typedef struct TsNoiseModel TsNoiseModel;

/**
 * Rows produced by [`ts_sweep_run`].
 */
typedef struct TsSweep TsSweep;

typedef struct TsScore {
  double f;
  double d;
  double k;
  double tau;
  double tau_classical;
  bool quantum_useful;
} TsScore;

typedef struct TsCrossover {
  double p;
  double k;
  double alpha_cl;
  /**
   * Meaningful only when `has_alpha_nk` is set.
   */
  double alpha_nk;
  bool has_alpha_nk;
  /**
   * `|closed form - bisection|`.
   */
  double route_residual;
} TsCrossover;

typedef struct TsSweepRow {
  double alpha;
  double k;
  double f;
  double d;
  double tau;
  double tau_noiseless;
  double tau_classical;
  bool nonclassical;
  bool beats_noiseless;
} TsSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t ts_last_error(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *ts_status_message(enum TsStatus status);

/**
 * Parses a model spec such as `bit_flip:p=0.7,q=1`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_model_parse(const char *spec, struct TsNoiseModel **out);

/**
 * # Safety
 * `model` must come from [`ts_model_parse`] and not be used afterwards.
 */
void ts_model_free(struct TsNoiseModel *model);

/**
 * Canonical spec string of `model`, written like [`ts_last_error`]. Returns
 * the full length, or 0 if `model` is null.
 *
 * # Safety
 * `model` must be null or a live handle; `buf` null or valid for `len` bytes.
 */
size_t ts_model_spec(const struct TsNoiseModel *model, char *buf, size_t len);

/**
 * Score of an `n`-link resource (`n = 1` for a single link) from the
 * closed-form catalog, falling back to quadrature.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TsStatus ts_score(const struct TsNoiseModel *model,
                       double alpha,
                       uint32_t n,
                       double k,
                       struct TsScore *out);

/**
 * Fidelity of teleporting the input at Bloch angles `(theta, phi)`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TsStatus ts_teleport_fidelity(const struct TsNoiseModel *model,
                                   double alpha,
                                   double theta,
                                   double phi,
                                   double *out);

/**
 * `k* = min F/D` over `[lo, hi]` and the minimizing alpha.
 *
 * # Safety
 * `model` must be a live handle; `k_star_out` and `alpha_out` writable.
 */
enum TsStatus ts_k_star(const struct TsNoiseModel *model,
                        double lo,
                        double hi,
                        double *k_star_out,
                        double *alpha_out);

/**
 * Global-depolarizing crossover at state weight `p` and sensitivity `k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsStatus ts_alpha_nk(double p, double k, struct TsCrossover *out);

/**
 * Sweeps `grid` (sorted, within `[0, 1/2]`) for every `k` in `ks`.
 *
 * # Safety
 * `model` must be a live handle; `ks` and `grid` valid for their lengths;
 * `out` writable.
 */
enum TsStatus ts_sweep_run(const struct TsNoiseModel *model,
                           const double *ks,
                           size_t ks_len,
                           const double *grid,
                           size_t grid_len,
                           struct TsSweep **out);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t ts_sweep_len(const struct TsSweep *sweep);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
enum TsStatus ts_sweep_row(const struct TsSweep *sweep, size_t index, struct TsSweepRow *out);

/**
 * # Safety
 * `sweep` must come from [`ts_sweep_run`] and not be used afterwards.
 */
void ts_sweep_free(struct TsSweep *sweep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELESCORE_H */
