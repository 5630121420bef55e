/* C ABI for the centralizer-lab library. */

#ifndef CENTRALIZER_LAB_H
#define CENTRALIZER_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible `clab_*` call.
 */
typedef enum clab_status {
  /**
   * Success.
   */
  CLAB_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CLAB_ERR_NULL = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CLAB_ERR_UTF8 = 2,
  /**
   * JSON or numeric input could not be parsed.
   */
  CLAB_ERR_PARSE = 3,
  /**
   * The computation reported a mathematical error
   * (non-hyperbolic, singular, empty subshift, ...).
   */
  CLAB_ERR_MATH = 4,
  /**
   * An internal invariant failed.
   */
  CLAB_ERR_PANIC = 5,
} clab_status;

/**
 * Opaque handle to an exact integer matrix.
 */
typedef struct clab_matrix clab_matrix;

/**
 * Opaque handle to a subshift of finite type.
 */
typedef struct clab_sft clab_sft;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent error on this thread. The pointer
 * stays valid until the next failing `clab_*` call on the thread.
 */
const char *clab_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from a `clab_*` call and not have been freed before.
 */
void clab_string_free(char *s);

/**
 * Parse a square integer matrix from JSON
 * (`{"n": 2, "entries": [[2,1],[1,1]]}`; entries beyond 2^53 as strings).
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be a valid pointer.
 */
enum clab_status clab_matrix_parse(const char *json, struct clab_matrix **out);

/**
 * Release a matrix handle.
 *
 * # Safety
 * `m` must come from `clab_matrix_parse` and not have been freed.
 */
void clab_matrix_free(struct clab_matrix *m);

/**
 * Determinant as a JSON string `{"det": "..."}` (exact decimal digits).
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be valid.
 */
enum clab_status clab_matrix_det(const struct clab_matrix *m, char **out);

/**
 * Characteristic polynomial coefficients (constant term first) as
 * `{"charpoly": ["...", ...]}` with exact decimal digit strings.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be valid.
 */
enum clab_status clab_matrix_charpoly(const struct clab_matrix *m, char **out);

/**
 * Certified eigenvalue enclosures, hyperbolicity flag, and entropy
 * interval at the given tolerance.
 *
 * # Safety
 * `m` must be a live matrix handle; `tol` NUL-terminated; `out` valid.
 */
enum clab_status clab_matrix_spectrum(const struct clab_matrix *m, const char *tol, char **out);

/**
 * Certified topological entropy interval `{"entropy": {...}}`.
 *
 * # Safety
 * `m` must be a live matrix handle; `tol` NUL-terminated; `out` valid.
 */
enum clab_status clab_matrix_entropy(const struct clab_matrix *m, const char *tol, char **out);

/**
 * Commutant lattice basis, optionally with the units in the given
 * coordinate box (`box_bound = 0` skips unit enumeration).
 *
 * # Safety
 * `m` must be a live matrix handle; `out` valid.
 */
enum clab_status clab_matrix_commutant(const struct clab_matrix *m, uint32_t box_bound, char **out);

/**
 * Search power relations `A^n = B^m` up to `max_exp` and, when
 * `certify` is nonzero, attempt an independence certificate at the
 * given tolerance.
 *
 * # Safety
 * `a` and `b` must be live matrix handles; `tol` NUL-terminated;
 * `out` valid.
 */
enum clab_status clab_relations(const struct clab_matrix *a,
                                const struct clab_matrix *b,
                                uint32_t max_exp,
                                int32_t certify,
                                const char *tol,
                                char **out);

/**
 * Number of fixed points of the n-th iterate, `{"fixed_points": "..."}`
 * as exact decimal digits.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` valid.
 */
enum clab_status clab_periodic_count(const struct clab_matrix *m, uint64_t n, char **out);

/**
 * Build a subshift of finite type from a 0/1 transition matrix given
 * as JSON rows, e.g. `[[1,1],[1,0]]`.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be valid.
 */
enum clab_status clab_sft_parse(const char *json, struct clab_sft **out);

/**
 * Release a subshift handle.
 *
 * # Safety
 * `s` must come from `clab_sft_parse` and not have been freed.
 */
void clab_sft_free(struct clab_sft *s);

/**
 * Certified entropy interval of the subshift.
 *
 * # Safety
 * `s` must be a live subshift handle; `tol` NUL-terminated; `out` valid.
 */
enum clab_status clab_sft_entropy(const struct clab_sft *s, const char *tol, char **out);

/**
 * Parry (maximal entropy) Markov measure: stationary vector,
 * transition matrix, and entropy, all as certified intervals.
 *
 * # Safety
 * `s` must be a live subshift handle; `tol` NUL-terminated; `out` valid.
 */
enum clab_status clab_sft_parry(const struct clab_sft *s, const char *tol, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CENTRALIZER_LAB_H */
