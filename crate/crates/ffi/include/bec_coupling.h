#ifndef BEC_COUPLING_H
#define BEC_COUPLING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  BEC_STATUS_OK = 0,
  /**
   * Null pointer, out-of-range parameter or malformed input.
   */
  BEC_STATUS_INVALID_ARGUMENT = 1,
  BEC_STATUS_PRECONDITION = 2,
  BEC_STATUS_NO_BRACKET = 3,
  BEC_STATUS_NO_NONTRIVIAL_FIXED_POINT = 4,
  BEC_STATUS_NO_CONVERGENCE = 5,
  BEC_STATUS_UNREACHABLE = 6,
  BEC_STATUS_QUADRATURE = 7,
  BEC_STATUS_EMPTY = 8,
  BEC_STATUS_BUFFER_TOO_SMALL = 9,
  /**
   * A Rust panic was caught at the boundary.
   */
  BEC_STATUS_PANIC = 10,
} BecStatus;

/**
 * Density-evolution variant accepted by [`bec_system_new`].
 */
typedef enum {
  BEC_VARIANT_UNCOUPLED = 0,
  BEC_VARIANT_CHAIN = 1,
  BEC_VARIANT_SMOOTHED = 2,
} BecVariant;

/**
 * Regular `(l, r)` ensemble.
 */
typedef struct BecEnsemble BecEnsemble;

/**
 * One-sided fixed point.
 */
typedef struct BecFixedPoint BecFixedPoint;

/**
 * Uncoupled, chain or smoothed DE system.
 */
typedef struct BecSystem BecSystem;

typedef struct {
  double eps_bp;
  double eps_map;
  double x_bp;
  double x_map;
  double tolerance;
} BecThresholds;

typedef struct {
  double eps;
  double x_u;
  double x_s;
  double x_star;
  double x_upstar;
  double kappa_star;
  double lambda_star;
  double kappa_upstar;
  double lambda_upstar;
} BecLandscape;

typedef struct {
  double x_hat;
  double omega_hat;
  double l_omega_hat;
} BecSsExponent;

typedef struct {
  double eps_star;
  double chi;
  double residual;
  double eps_spread;
  double length_bound;
  bool proper;
  size_t v_iterations;
  /**
   * Number of sections, `L' + 1`.
   */
  size_t sections;
} BecFixedPointSummary;

typedef struct {
  double area;
  double bound;
  double design_rate;
  double residual;
  size_t intervals;
  double refinement_delta;
} BecArea;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *bec_version(void);

/**
 * Message of the last failed call on this thread, or NULL after a success.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *bec_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
BecStatus bec_ensemble_new(uint32_t l, uint32_t r, BecEnsemble **out);

/**
 * # Safety
 * `e` must be NULL or a handle from [`bec_ensemble_new`] not yet freed.
 */
void bec_ensemble_free(BecEnsemble *e);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
BecStatus bec_ensemble_design_rate(const BecEnsemble *e, double *out);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
BecStatus bec_thresholds(const BecEnsemble *e, double tol, BecThresholds *out);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
BecStatus bec_map_threshold_via_area(const BecEnsemble *e, double quad_tol, double *out);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
BecStatus bec_h_landscape(const BecEnsemble *e, double eps, double tol, BecLandscape *out);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
BecStatus bec_ss_exponent(const BecEnsemble *e, double tol, BecSsExponent *out);

/**
 * `variant` is a [`BecVariant`] value; `w` is ignored unless it is `BEC_VARIANT_SMOOTHED`.
 *
 * # Safety
 * `out` must be writable.
 */
BecStatus bec_system_new(uint32_t variant,
                         uint32_t l,
                         uint32_t r,
                         size_t half_length,
                         size_t w,
                         BecSystem **out);

/**
 * # Safety
 * `s` must be NULL or a handle from [`bec_system_new`] not yet freed.
 */
void bec_system_free(BecSystem *s);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
BecStatus bec_system_sections(const BecSystem *s, size_t *out);

/**
 * BP threshold of the system by bisection on forward-DE outcomes.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
BecStatus bec_system_bp_threshold(const BecSystem *s,
                                  double de_tol,
                                  size_t max_iterations,
                                  double bisect_tol,
                                  double *out);

/**
 * EBP curve on `n` entropies; writes `n` values into each output array.
 *
 * # Safety
 * `chi` must point to `n` readable doubles; `eps_out` and `h_out` to `n`
 * writable doubles; `converged_out` to `n` writable bytes or be NULL.
 */
BecStatus bec_system_ebp_curve(const BecSystem *s,
                               const double *chi,
                               size_t n,
                               double de_tol,
                               size_t max_iterations,
                               double *eps_out,
                               double *h_out,
                               uint8_t *converged_out);

/**
 * One-sided fixed point of length `lp` at entropy `chi`.
 *
 * # Safety
 * `out` must be writable.
 */
BecStatus bec_fp_construct(uint32_t l,
                           uint32_t r,
                           size_t w,
                           size_t lp,
                           double chi,
                           bool enforce_length_bound,
                           BecFixedPoint **out);

/**
 * # Safety
 * `fp` must be NULL or a handle from [`bec_fp_construct`] not yet freed.
 */
void bec_fp_free(BecFixedPoint *fp);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
BecStatus bec_fp_summary(const BecFixedPoint *fp, BecFixedPointSummary *out);

/**
 * Copies the sections `x_{-L'}, ..., x_0` into `buf`.
 *
 * # Safety
 * `fp` must be a live handle and `buf` must point to `len` writable doubles.
 */
BecStatus bec_fp_values(const BecFixedPoint *fp, double *buf, size_t len);

/**
 * EXIT area of the interpolated family of half-length `half_length`.
 *
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
BecStatus bec_fp_family_area(const BecFixedPoint *fp,
                             size_t half_length,
                             size_t intervals,
                             BecArea *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEC_COUPLING_H */
