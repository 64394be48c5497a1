#ifndef NONHERM_H
#define NONHERM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NhStatus {
  NH_STATUS_OK = 0,
  NH_STATUS_NULL_POINTER = 1,
  NH_STATUS_INVALID_ARGUMENT = 2,
  NH_STATUS_CONFIG = 3,
  NH_STATUS_ZERO_PROBABILITY = 4,
  NH_STATUS_NUMERICAL = 5,
  NH_STATUS_PANIC = 6,
} NhStatus;

typedef enum NhPhase {
  NH_PHASE_SYMMETRIC = 0,
  NH_PHASE_BROKEN = 1,
  NH_PHASE_EXCEPTIONAL_POINT = 2,
} NhPhase;

typedef enum NhKrausMode {
  NH_KRAUS_MODE_EXACT = 0,
  NH_KRAUS_MODE_GAUSSIAN = 1,
} NhKrausMode;

/**
 * Trained or loaded variational circuit.
 */
typedef struct NhPqc NhPqc;

typedef struct NhComplex {
  double re;
  double im;
} NhComplex;

typedef struct NhSpectrum {
  struct NhComplex lambda_plus;
  struct NhComplex lambda_minus;
  enum NhPhase phase;
} NhSpectrum;

typedef struct NhTrainOptions {
  double learning_rate;
  size_t max_iterations;
  double target_cost;
  /**
   * Non-zero selects Adam(0.9, 0.999, 1e-8); zero selects plain gradient descent.
   */
  int32_t use_adam;
  uint64_t seed;
} NhTrainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nh_version(void);

/**
 * Eigenvalues and PT phase of `H = [[iΓ/2, ω/2], [ω/2, −iΓ/2]]`.
 *
 * # Safety
 * `out` must point to writable memory for one `NhSpectrum`.
 */
enum NhStatus nh_spectrum(double omega, double gamma, struct NhSpectrum *out);

/**
 * Normalized exact evolution `A_t|ψ⟩/‖A_t|ψ⟩‖` of a single qubit.
 *
 * # Safety
 * `input` must point to 2 readable and `out` to 2 writable `NhComplex`.
 */
enum NhStatus nh_evolve_pure(double omega,
                             double gamma,
                             double t,
                             const struct NhComplex *input,
                             struct NhComplex *out);

/**
 * `steps` postselected Trotter steps over `[0, t]`. `mode` is an
 * `NhKrausMode` value. Writes the final state and, if
 * `cumulative_probability` is not NULL, the product of the per-step
 * success probabilities.
 *
 * # Safety
 * `input` must point to 2 readable and `out` to 2 writable `NhComplex`;
 * `cumulative_probability` is NULL or writable.
 */
enum NhStatus nh_trotter_evolve(double omega,
                                double gamma,
                                double t,
                                size_t steps,
                                int32_t mode,
                                const struct NhComplex *input,
                                struct NhComplex *out,
                                double *cumulative_probability);

/**
 * Stationary `M_z` reached from `I/2` (0 in the PT-symmetric phase).
 *
 * # Safety
 * `out` must be writable.
 */
enum NhStatus nh_asymptotic_mz(double omega, double gamma, double *out);

/**
 * Wootters concurrence of a two-qubit density matrix given as 16 entries
 * in row-major order.
 *
 * # Safety
 * `rho` must point to 16 readable `NhComplex`; `out` must be writable.
 */
enum NhStatus nh_concurrence(const struct NhComplex *rho, double *out);

/**
 * Defaults used by the CLI: plain gradient descent, rate 0.05, 2000
 * iterations, target cost 1e-4, seed 0.
 */
struct NhTrainOptions nh_train_options_default(void);

/**
 * Trains the circuit for `(omega, gamma, t)` on the four tomographic inputs.
 * The handle is written even when the target cost is missed; check
 * [`nh_pqc_converged`].
 *
 * # Safety
 * `options` must be readable; `out` must be writable.
 */
enum NhStatus nh_pqc_train(double omega,
                           double gamma,
                           double t,
                           const struct NhTrainOptions *options,
                           struct NhPqc **out);

/**
 * Handle from 24 raw angles (no training metadata).
 *
 * # Safety
 * `params` must point to 24 readable doubles; `out` must be writable.
 */
enum NhStatus nh_pqc_from_params(const double *params, struct NhPqc **out);

/**
 * Loads a checkpoint file written by `nonherm train`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NhStatus nh_pqc_load(const char *path, struct NhPqc **out);

/**
 * Writes the handle's checkpoint. Fails with `NH_STATUS_INVALID_ARGUMENT`
 * for handles built from raw parameters.
 *
 * # Safety
 * `pqc` must be a live handle; `path` a NUL-terminated string.
 */
enum NhStatus nh_pqc_save(const struct NhPqc *pqc, const char *path);

/**
 * Runs the postselected circuit on a single-qubit input.
 *
 * # Safety
 * `pqc` must be a live handle; `input`/`out` point to 2 `NhComplex`;
 * `success_probability` is NULL or writable.
 */
enum NhStatus nh_pqc_apply(const struct NhPqc *pqc,
                           const struct NhComplex *input,
                           struct NhComplex *out,
                           double *success_probability);

/**
 * Copies the 24 angles into `out`.
 *
 * # Safety
 * `pqc` must be a live handle; `out` must have room for 24 doubles.
 */
enum NhStatus nh_pqc_params(const struct NhPqc *pqc, double *out);

/**
 * Final training cost, or NaN for handles built from raw parameters.
 *
 * # Safety
 * `pqc` must be a live handle or NULL.
 */
double nh_pqc_final_cost(const struct NhPqc *pqc);

/**
 * 1 if training reached its target cost, 0 otherwise (including raw handles).
 *
 * # Safety
 * `pqc` must be a live handle or NULL.
 */
int32_t nh_pqc_converged(const struct NhPqc *pqc);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `pqc` must be NULL or a handle not yet freed.
 */
void nh_pqc_free(struct NhPqc *pqc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONHERM_H */
