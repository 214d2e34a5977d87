#ifndef SOLWAVE_H
#define SOLWAVE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwStatus {
  SW_STATUS_OK = 0,
  SW_STATUS_NULL_POINTER = 1,
  SW_STATUS_INVALID_ARGUMENT = 2,
  SW_STATUS_CONFIG = 3,
  SW_STATUS_DEGENERATE_CONSTRAINT = 4,
  SW_STATUS_INVALID_FAMILY = 5,
  SW_STATUS_SUPPORT_OVERLAP = 6,
  SW_STATUS_DIVERGED = 7,
  SW_STATUS_NUMERICAL_BLOWUP = 8,
  SW_STATUS_IO = 9,
  SW_STATUS_INTERNAL = 10,
  SW_STATUS_PANIC = 11,
} SwStatus;

/**
 * Periodic grid.
 */
typedef struct SwGrid SwGrid;

/**
 * Result of a constrained minimization.
 */
typedef struct SwGroundState SwGroundState;

/**
 * Model parameters.
 */
typedef struct SwParams SwParams;

/**
 * Two-component complex state on a grid.
 */
typedef struct SwState SwState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sw_version(void);

/**
 * Build model parameters with `n_couplings` terms `(tau[k], q[k])`.
 *
 * # Safety
 * `tau` and `q` must point to `n_couplings` doubles; `out` must be writable.
 */
enum SwStatus sw_params_new(double alpha,
                            double beta,
                            double p,
                            double r,
                            const double *tau,
                            const double *q,
                            size_t n_couplings,
                            struct SwParams **out);

/**
 * # Safety
 * `params` must come from `sw_params_new` and not be used afterwards.
 */
void sw_params_free(struct SwParams *params);

/**
 * Periodic grid on `[-half_length, half_length)` with `n` points.
 *
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_grid_new(double half_length, size_t n, struct SwGrid **out);

/**
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t sw_grid_len(const struct SwGrid *grid);

/**
 * # Safety
 * `grid` must come from `sw_grid_new` and not be used afterwards.
 */
void sw_grid_free(struct SwGrid *grid);

/**
 * State from split real and imaginary sample arrays of the grid's length.
 *
 * # Safety
 * Each array must hold `sw_grid_len(grid)` doubles; `out` must be writable.
 */
enum SwStatus sw_state_new(const struct SwGrid *grid,
                           const double *u_re,
                           const double *u_im,
                           const double *v_re,
                           const double *v_im,
                           struct SwState **out);

/**
 * Number of samples per component.
 *
 * # Safety
 * `state` must be null or a live state handle.
 */
size_t sw_state_len(const struct SwState *state);

/**
 * Copy the samples into caller arrays of length `len`, which must equal
 * `sw_state_len(state)`. Null arrays are skipped.
 *
 * # Safety
 * Non-null arrays must hold `len` writable doubles.
 */
enum SwStatus sw_state_copy(const struct SwState *state,
                            double *u_re,
                            double *u_im,
                            double *v_re,
                            double *v_im,
                            size_t len);

/**
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void sw_state_free(struct SwState *state);

/**
 * Closed-form `(φ, φ)` pair at frequency `omega` for equal self-interaction `alpha`.
 *
 * # Safety
 * `grid` must be live; `out` must be writable.
 */
enum SwStatus sw_symmetric_pair(const struct SwGrid *grid,
                                double alpha,
                                double omega,
                                struct SwState **out);

/**
 * Energy of a state.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SwStatus sw_energy(const struct SwParams *params, const struct SwState *state, double *out);

/**
 * Masses of both components.
 *
 * # Safety
 * `state` must be live; outputs must be writable.
 */
enum SwStatus sw_mass(const struct SwState *state, double *out_u, double *out_v);

/**
 * Euler-Lagrange residual under multipliers `(omega1, omega2)`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SwStatus sw_el_residual(const struct SwParams *params,
                             const struct SwState *state,
                             double omega1,
                             double omega2,
                             double *out);

/**
 * Minimize the energy at masses `(s, t)` on the grid with default
 * multistart settings and tolerance `tol`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SwStatus sw_minimize(const struct SwParams *params,
                          const struct SwGrid *grid,
                          double s,
                          double t,
                          double tol,
                          size_t max_iter,
                          struct SwGroundState **out);

/**
 * Energy, multipliers, residual and iteration count of a ground state.
 * Null outputs are skipped.
 *
 * # Safety
 * `gs` must be live; non-null outputs must be writable.
 */
enum SwStatus sw_ground_state_info(const struct SwGroundState *gs,
                                   double *theta,
                                   double *omega1,
                                   double *omega2,
                                   double *residual,
                                   size_t *iterations);

/**
 * Copy of the minimizing profile as a new state handle.
 *
 * # Safety
 * `gs` must be live; `out` must be writable.
 */
enum SwStatus sw_ground_state_profile(const struct SwGroundState *gs, struct SwState **out);

/**
 * # Safety
 * `gs` must come from `sw_minimize` and not be used afterwards.
 */
void sw_ground_state_free(struct SwGroundState *gs);

/**
 * Integrate from `state` to time `horizon` with step `dt`, returning the
 * final state and the relative energy drift.
 *
 * # Safety
 * Handles must be live; `out` must be writable; `drift_h` may be null.
 */
enum SwStatus sw_evolve(const struct SwParams *params,
                        const struct SwState *state,
                        double dt,
                        double horizon,
                        struct SwState **out,
                        double *drift_h);

/**
 * Distance from `state` to the symmetry orbit of `reference`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SwStatus sw_symmetry_distance(const struct SwState *state,
                                   const struct SwState *reference,
                                   double *out);

/**
 * Run a JSON run configuration and return its JSON summary, to be
 * released with `sw_string_free`. Check failures still return `SW_STATUS_OK`;
 * inspect the summary.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum SwStatus sw_run_json(const char *config_json, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void sw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLWAVE_H */
