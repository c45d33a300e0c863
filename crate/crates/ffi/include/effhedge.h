#ifndef EFFHEDGE_H
#define EFFHEDGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum EhStatus {
  EH_STATUS_OK = 0,
  EH_STATUS_NULL_POINTER = 1,
  EH_STATUS_VALIDATION = 2,
  EH_STATUS_NUMERICAL = 3,
  EH_STATUS_IO = 4,
  EH_STATUS_PANIC = 5,
} EhStatus;

/**
 * Threshold rule for the linear-loss plan.
 */
typedef enum EhLinearMode {
  EH_LINEAR_MODE_MIN = 0,
  EH_LINEAR_MODE_MAX = 1,
} EhLinearMode;

/**
 * Opaque market model.
 */
typedef struct EhModel EhModel;

/**
 * Opaque calibrated hedging plan.
 */
typedef struct EhPlan EhPlan;

/**
 * Integrated volatility quantities of the window `[t, T]`.
 */
typedef struct EhIntegrated {
  double sigma_total;
  double theta_total;
  double alpha;
} EhIntegrated;

typedef struct EhMcEstimate {
  double mean;
  double std_error;
} EhMcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *eh_last_error_message(void);

double eh_norm_cdf(double z);

/**
 * Constant-coefficient model.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum EhStatus eh_model_standard(double m,
                                double sigma,
                                double spot,
                                double strike,
                                double horizon,
                                struct EhModel **out);

/**
 * Piecewise-constant coefficients: on `[times[i], times[i+1])` the drift is
 * `m[i]` and the volatility `sigma[i]`; the last piece runs to `domain_end`.
 *
 * # Safety
 * `times`, `m` and `sigma` must each point to `len` readable values; `out`
 * must be null or valid for writes.
 */
enum EhStatus eh_model_time_varying(const double *times,
                                    const double *m,
                                    const double *sigma,
                                    size_t len,
                                    double domain_end,
                                    double spot,
                                    double strike,
                                    double horizon,
                                    struct EhModel **out);

/**
 * Fractional model with Hurst index in `(1/2, 1)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum EhStatus eh_model_fractional(double m,
                                  double sigma,
                                  double hurst,
                                  double spot,
                                  double strike,
                                  double horizon,
                                  struct EhModel **out);

/**
 * # Safety
 * `model` must be null or a handle from an `eh_model_*` constructor that
 * has not been freed.
 */
void eh_model_free(struct EhModel *model);

/**
 * # Safety
 * `model` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_integrated_quantities(const struct EhModel *model,
                                       double t,
                                       struct EhIntegrated *out);

/**
 * # Safety
 * `model` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_perfect_hedge_price(const struct EhModel *model, double t, double x, double *out);

/**
 * Power-loss plan costing `budget`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_calibrate_power(const struct EhModel *model,
                                 double p,
                                 double budget,
                                 struct EhPlan **out);

/**
 * Linear-loss plan costing `budget`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_calibrate_linear(const struct EhModel *model,
                                  double budget,
                                  enum EhLinearMode mode,
                                  struct EhPlan **out);

/**
 * # Safety
 * `plan` must be a live handle; `value` and `delta` must be null or valid
 * for writes.
 */
enum EhStatus eh_plan_value_and_delta(const struct EhPlan *plan,
                                      double t,
                                      double x,
                                      double *value,
                                      double *delta);

/**
 * # Safety
 * `plan` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_plan_budget(const struct EhPlan *plan, double *out);

/**
 * # Safety
 * `plan` must be null or a handle from a calibration call that has not been
 * freed.
 */
void eh_plan_free(struct EhPlan *plan);

/**
 * Monte Carlo price of the model's call under the pricing measure on a
 * uniform grid. Deterministic in `seed` for any `workers`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be null or valid for writes.
 */
enum EhStatus eh_mc_price_call(const struct EhModel *model,
                               uint64_t n_paths,
                               size_t steps,
                               uint64_t seed,
                               size_t workers,
                               struct EhMcEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFFHEDGE_H */
