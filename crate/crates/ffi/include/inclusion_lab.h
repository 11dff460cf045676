#ifndef INCLUSION_LAB_H
#define INCLUSION_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IlStatus {
  IL_STATUS_OK = 0,
  IL_STATUS_NULL_POINTER = 1,
  IL_STATUS_INVALID_ARGUMENT = 2,
  IL_STATUS_NUMERICAL = 3,
  IL_STATUS_BUFFER_TOO_SMALL = 4,
  IL_STATUS_OUT_OF_RANGE = 5,
  IL_STATUS_PANIC = 6,
} IlStatus;

/**
 * Opaque grid with its assembled operators.
 */
typedef struct IlGrid IlGrid;

/**
 * Opaque result of [`il_simulate`].
 */
typedef struct IlTrajectory IlTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of this thread, NUL-terminated and truncated to
 * `capacity`. Returns the full message length in bytes, excluding the NUL.
 *
 * # Safety
 * `buffer` must be null or point to `capacity` writable bytes.
 */
size_t il_last_error_message(char *buffer, size_t capacity);

/**
 * Aligned grid with `per_subinterval` cells on each `[k/n, (k+1)/n]`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum IlStatus il_grid_new(size_t n, size_t per_subinterval, struct IlGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`il_grid_new`] not yet freed.
 */
void il_grid_free(struct IlGrid *grid);

/**
 * Number of interior nodes.
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
enum IlStatus il_grid_interior_len(const struct IlGrid *grid, size_t *out);

/**
 * `D(λ)` for `n ≥ 2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IlStatus il_characteristic(size_t n, double lambda, double *out);

/**
 * The `count` lowest eigenvalues of the linearization at `vₙ±`.
 *
 * # Safety
 * `buffer` must hold `capacity` doubles; `written` and `negative_count`
 * must be writable (`negative_count` may be null).
 */
enum IlStatus il_find_eigenvalues(size_t n,
                                  size_t count,
                                  double *buffer,
                                  size_t capacity,
                                  size_t *written,
                                  size_t *negative_count);

/**
 * `vₙ±(x)`; `sign` is `1` or `-1`, ignored for `n = 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IlStatus il_equilibrium_eval(size_t n, int32_t sign, double x, double *out);

/**
 * Determinant of the zero-mode system, `n ≥ 2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IlStatus il_zero_mode_determinant(size_t n, double *out);

/**
 * Runs from `vₙ± + amplitude·e_index` on `grid` (aligned for `n`).
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
enum IlStatus il_simulate(const struct IlGrid *grid,
                          int32_t sign,
                          size_t eigen_index,
                          double amplitude,
                          double dt,
                          double t_end,
                          size_t record_stride,
                          struct IlTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from [`il_simulate`] not yet freed.
 */
void il_trajectory_free(struct IlTrajectory *traj);

/**
 * Number of stored snapshots.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum IlStatus il_trajectory_len(const struct IlTrajectory *traj, size_t *out);

/**
 * Time, `L²` distance to the reference equilibrium and energy of snapshot
 * `index`. Any of the out-pointers may be null.
 *
 * # Safety
 * `traj` must be a live handle; non-null out-pointers must be writable.
 */
enum IlStatus il_trajectory_record(const struct IlTrajectory *traj,
                                   size_t index,
                                   double *time,
                                   double *dist_l2,
                                   double *energy);

/**
 * Copies the interior nodal values of snapshot `index`.
 *
 * # Safety
 * `traj` must be a live handle, `buffer` must hold `capacity` doubles and
 * `written` must be writable.
 */
enum IlStatus il_trajectory_state(const struct IlTrajectory *traj,
                                  size_t index,
                                  double *buffer,
                                  size_t capacity,
                                  size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INCLUSION_LAB_H */
