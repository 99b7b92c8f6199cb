#ifndef OSTROVSKY_HDG_H
#define OSTROVSKY_HDG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Boundary regime codes accepted by [`oh_simulation_new`].
 */
#define OH_DIRICHLET_BETA_POS 0

#define OH_DIRICHLET_BETA_NEG 1

#define OH_PERIODIC 2

/**
 * Result codes of the C interface.
 */
typedef enum OhStatus {
  OH_STATUS_OK = 0,
  OH_STATUS_NULL_POINTER = 1,
  OH_STATUS_INVALID_CONFIG = 2,
  OH_STATUS_USAGE = 3,
  OH_STATUS_DOMAIN = 4,
  OH_STATUS_SINGULAR = 5,
  OH_STATUS_NEWTON_FAILURE = 6,
  OH_STATUS_PROFILE_FAILURE = 7,
  OH_STATUS_IO = 8,
  OH_STATUS_PANIC = 9,
} OhStatus;

/**
 * Solitary-wave profile on an equispaced periodic grid.
 */
typedef struct OhProfile OhProfile;

/**
 * Time-stepping state: discretization plus current solution.
 */
typedef struct OhSimulation OhSimulation;

/**
 * Physical and numerical parameters of a simulation.
 */
typedef struct OhSimulationParams {
  double alpha;
  double beta;
  double gamma;
  /**
   * One of the `OH_*` regime codes.
   */
  uint32_t bc_regime;
  double x_left;
  double x_right;
  size_t n_elements;
  size_t degree;
  double theta;
  double dt;
} OhSimulationParams;

/**
 * Scalar initial condition `u0(x)`; `ctx` is passed through unchanged.
 */
typedef double (*OhScalarFn)(double x, void *ctx);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *oh_last_error(void);

/**
 * Static name of a status code.
 */
const char *oh_status_name(enum OhStatus status);

/**
 * Creates a simulation with the standard stabilization. On success `*out`
 * owns a handle to be released with [`oh_simulation_free`].
 *
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
enum OhStatus oh_simulation_new(const struct OhSimulationParams *params, struct OhSimulation **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or a handle from [`oh_simulation_new`] not yet freed.
 */
void oh_simulation_free(struct OhSimulation *sim);

/**
 * Projects `u0` onto the discrete space, computes the auxiliary fields and
 * sets the time to 0.
 *
 * # Safety
 * `sim` must be a live handle; `u0` must be safe to call with `ctx`.
 */
enum OhStatus oh_simulation_init(struct OhSimulation *sim, OhScalarFn u0, void *ctx);

/**
 * Advances `n_steps` steps of size `dt`. On failure the state is left at
 * the last completed step.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum OhStatus oh_simulation_step(struct OhSimulation *sim, size_t n_steps);

/**
 * Current time and discrete energy `||u_h||^2 / 2`.
 *
 * # Safety
 * `sim` must be a live handle; `time` and `energy` may each be NULL.
 */
enum OhStatus oh_simulation_status(const struct OhSimulation *sim, double *time, double *energy);

/**
 * Evaluates `u_h` at `n` points `x[i]` into `values[i]`.
 *
 * # Safety
 * `sim` must be a live handle; `x` and `values` must hold `n` doubles.
 */
enum OhStatus oh_simulation_sample(const struct OhSimulation *sim,
                                   const double *x,
                                   size_t n,
                                   double *values);

/**
 * Solitary wave of phase speed `c_w` on a periodic grid of `grid_points`
 * values over `[0, length)`, with default iteration settings.
 *
 * # Safety
 * `out` must point to writable storage; `*out` is to be released with
 * [`oh_profile_free`].
 */
enum OhStatus oh_profile_new(double alpha,
                             double beta,
                             double gamma,
                             double c_w,
                             double length,
                             size_t grid_points,
                             struct OhProfile **out);

/**
 * # Safety
 * `prof` must be NULL or a handle from [`oh_profile_new`] not yet freed.
 */
void oh_profile_free(struct OhProfile *prof);

/**
 * Number of grid values; 0 for NULL.
 *
 * # Safety
 * `prof` must be NULL or a live handle.
 */
size_t oh_profile_len(const struct OhProfile *prof);

/**
 * Copies the grid values (at `x_j = j L / K`) into `values`, which must hold
 * `capacity >= oh_profile_len(prof)` doubles.
 *
 * # Safety
 * `prof` must be a live handle and `values` valid for `capacity` writes.
 */
enum OhStatus oh_profile_values(const struct OhProfile *prof, double *values, size_t capacity);

/**
 * Iterations used and final residual of the profile solve.
 *
 * # Safety
 * `prof` must be a live handle; the outputs may be NULL.
 */
enum OhStatus oh_profile_info(const struct OhProfile *prof, size_t *iterations, double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSTROVSKY_HDG_H */
