#ifndef UTVPI_H
#define UTVPI_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum UtvpiResult {
  UTVPI_RESULT_OK = 0,
  UTVPI_RESULT_NULL_POINTER = 1,
  UTVPI_RESULT_INVALID_UTF8 = 2,
  UTVPI_RESULT_PARSE = 3,
  UTVPI_RESULT_BOUND_OUT_OF_RANGE = 4,
  UTVPI_RESULT_UNKNOWN_VARIABLE = 5,
  UTVPI_RESULT_INVALID_COEFFICIENT = 6,
  UTVPI_RESULT_BUFFER_TOO_SMALL = 7,
} UtvpiResult;

/**
 * Outcome of asserting a constraint. Rejected constraints leave the solver
 * unchanged.
 */
typedef enum UtvpiVerdict {
  UTVPI_VERDICT_SAT = 0,
  UTVPI_VERDICT_UNSAT_RATIONAL = 10,
  UTVPI_VERDICT_UNSAT_INTEGER = 11,
} UtvpiVerdict;

typedef struct UtvpiSolver UtvpiSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty solver. Release it with `utvpi_solver_free`.
 */
struct UtvpiSolver *utvpi_solver_new(void);

/**
 * Releases a solver. Passing null is a no-op.
 *
 * # Safety
 * `solver` must come from `utvpi_solver_new` and not be used afterwards.
 */
void utvpi_solver_free(struct UtvpiSolver *solver);

/**
 * Message for the most recent failed call on this handle, or an empty
 * string. Valid until the next call on the same handle.
 *
 * # Safety
 * `solver` must be a live handle or null.
 */
const char *utvpi_solver_last_error(const struct UtvpiSolver *solver);

/**
 * Interns `name` and writes its index to `out_var`.
 *
 * # Safety
 * `solver` must be a live handle, `name` a NUL-terminated string, and
 * `out_var` null or writable.
 */
enum UtvpiResult utvpi_solver_var(struct UtvpiSolver *solver, const char *name, uint32_t *out_var);

/**
 * Number of variables known to the solver.
 *
 * # Safety
 * `solver` must be a live handle or null.
 */
uint32_t utvpi_solver_num_vars(const struct UtvpiSolver *solver);

/**
 * Asserts a constraint given as text, such as `"+x -y <= 3"`. Unknown
 * variable names are interned.
 *
 * # Safety
 * `solver` must be a live handle, `text` a NUL-terminated string, and
 * `out_verdict` null or writable.
 */
enum UtvpiResult utvpi_solver_add(struct UtvpiSolver *solver,
                                  const char *text,
                                  enum UtvpiVerdict *out_verdict);

/**
 * Asserts `a*x + b*y <= d` with `a, b` in `{-1, 0, 1}`. Variable indices
 * come from `utvpi_solver_var`; an index is ignored when its coefficient
 * is zero.
 *
 * # Safety
 * `solver` must be a live handle and `out_verdict` null or writable.
 */
enum UtvpiResult utvpi_solver_add_terms(struct UtvpiSolver *solver,
                                        int32_t a,
                                        uint32_t x,
                                        int32_t b,
                                        uint32_t y,
                                        int64_t d,
                                        enum UtvpiVerdict *out_verdict);

/**
 * Writes whether the asserted constraints imply the given one.
 *
 * # Safety
 * `solver` must be a live handle, `text` a NUL-terminated string, and
 * `out_implied` null or writable.
 */
enum UtvpiResult utvpi_solver_implied(struct UtvpiSolver *solver,
                                      const char *text,
                                      bool *out_implied);

/**
 * Watches a constraint. If it is already implied, `out_already` is set and
 * nothing is stored. Otherwise `tag` is reported by
 * `utvpi_solver_take_fired` once an assertion makes the constraint implied.
 *
 * # Safety
 * `solver` must be a live handle, `text` a NUL-terminated string, and
 * `out_already` null or writable.
 */
enum UtvpiResult utvpi_solver_watch(struct UtvpiSolver *solver,
                                    const char *text,
                                    uint64_t tag,
                                    bool *out_already);

/**
 * Moves the tags of watches that fired since the last call into `buf`, in
 * firing order. `out_len` receives the number of pending tags. If `cap` is
 * too small, nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `solver` must be a live handle, `buf` null or valid for `cap` writes,
 * and `out_len` null or writable.
 */
enum UtvpiResult utvpi_solver_take_fired(struct UtvpiSolver *solver,
                                         uint64_t *buf,
                                         size_t cap,
                                         size_t *out_len);

/**
 * Tightest implied bounds `lo <= x <= hi`. The `has_*` flags are false
 * where the variable is unbounded in that direction.
 *
 * # Safety
 * `solver` must be a live handle; the out pointers null or writable.
 */
enum UtvpiResult utvpi_solver_bounds(struct UtvpiSolver *solver,
                                     uint32_t var,
                                     bool *has_lower,
                                     int64_t *lower,
                                     bool *has_upper,
                                     int64_t *upper);

/**
 * Writes an integer solution of the asserted constraints, one value per
 * variable index. Fails with `BufferTooSmall` when `cap` is below
 * `utvpi_solver_num_vars`.
 *
 * # Safety
 * `solver` must be a live handle and `buf` valid for `cap` writes.
 */
enum UtvpiResult utvpi_solver_model(struct UtvpiSolver *solver, int64_t *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UTVPI_H */
