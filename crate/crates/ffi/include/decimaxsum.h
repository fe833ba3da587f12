#ifndef DECIMAXSUM_H
#define DECIMAXSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DmsStatus {
  DMS_STATUS_OK = 0,
  DMS_STATUS_NULL_POINTER = 1,
  DMS_STATUS_INVALID_UTF8 = 2,
  DMS_STATUS_PARSE_ERROR = 3,
  DMS_STATUS_INVALID_PROBLEM = 4,
  DMS_STATUS_INVALID_ARGUMENT = 5,
  DMS_STATUS_SOLVE_ERROR = 6,
  DMS_STATUS_BUFFER_TOO_SMALL = 7,
  DMS_STATUS_PANIC = 8,
} DmsStatus;

/**
 * Opaque problem handle.
 */
typedef struct DmsProblem DmsProblem;

/**
 * Opaque solution handle.
 */
typedef struct DmsSolution DmsSolution;

/**
 * Engine settings for [`dms_solve`]. Start from [`dms_solve_options_default`].
 */
typedef struct DmsSolveOptions {
  double eps;
  uint64_t limit;
  bool suppression;
  /**
   * 0 mean, 1 max, 2 none.
   */
  uint32_t normalization;
} DmsSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dms_version(void);

/**
 * Message for the last failed call on this thread, or null if none.
 * Valid until the next failing call on the same thread.
 */
const char *dms_last_error_message(void);

/**
 * Parses a JSON problem document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DmsStatus dms_problem_from_json(const char *json, struct DmsProblem **out);

/**
 * Generates a toroidal Ising instance.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DmsStatus dms_problem_generate_ising(size_t side,
                                          double beta,
                                          double unary_bound,
                                          uint64_t seed,
                                          struct DmsProblem **out);

/**
 * Serializes a problem to JSON. Release the string with [`dms_string_free`].
 *
 * # Safety
 * `problem` must come from this library; `out` must be a valid pointer.
 */
enum DmsStatus dms_problem_to_json(const struct DmsProblem *problem, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void dms_string_free(char *s);

/**
 * # Safety
 * `problem` must be null or a handle from this library, not yet freed.
 */
void dms_problem_free(struct DmsProblem *problem);

/**
 * Number of variables, 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t dms_problem_num_variables(const struct DmsProblem *problem);

struct DmsSolveOptions dms_solve_options_default(void);

/**
 * Runs the algorithm named by `algo` (same selectors as the CLI, e.g.
 * `"maxsum_ad_vp"` or `"decimaxsum:trigger=freq:rate:2;..."`).
 * `options` may be null for defaults.
 *
 * # Safety
 * `problem` must be a live handle, `algo` a NUL-terminated string, `options`
 * null or valid, and `out` a valid pointer.
 */
enum DmsStatus dms_solve(const struct DmsProblem *problem,
                         const char *algo,
                         uint64_t seed,
                         const struct DmsSolveOptions *options,
                         struct DmsSolution **out);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
double dms_solution_cost(const struct DmsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
double dms_solution_utility(const struct DmsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
uint64_t dms_solution_msgs_sent(const struct DmsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
uint64_t dms_solution_iterations(const struct DmsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t dms_solution_decimations(const struct DmsSolution *solution);

/**
 * Copies the value index of every variable into `buf`, which must hold at
 * least as many entries as the problem has variables.
 *
 * # Safety
 * `solution` must be a live handle and `buf` valid for `len` writes.
 */
enum DmsStatus dms_solution_values(const struct DmsSolution *solution, size_t *buf, size_t len);

/**
 * # Safety
 * `solution` must be null or a handle from this library, not yet freed.
 */
void dms_solution_free(struct DmsSolution *solution);

/**
 * Exhaustive optimum. Fails with `SolveError` above 2^24 assignments.
 *
 * # Safety
 * `problem` must be a live handle, `utility` a valid pointer, and `buf`
 * valid for `len` writes.
 */
enum DmsStatus dms_brute_force_optimum(const struct DmsProblem *problem,
                                       double *utility,
                                       size_t *buf,
                                       size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECIMAXSUM_H */
