#ifndef CPINF_H
#define CPINF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_ARGUMENT = 2,
  CP_STATUS_BUFFER_TOO_SMALL = 3,
  /**
   * The truncation did not stabilize; raise the cutoff.
   */
  CP_STATUS_UNSTABLE = 4,
  /**
   * Any other computation failure.
   */
  CP_STATUS_COMPUTATION_FAILED = 5,
  CP_STATUS_PANIC = 6,
} CpStatus;

/**
 * Opaque handle to an exceptional collection in the numerical Grothendieck group.
 */
typedef struct CpLattice CpLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Writes `dim Ext^k(source, target)` to `out[k]` for `0 <= k <= max_degree`.
 *
 * `source` and `target` are object specs such as `"P(-1)"`, `"L(2)"`,
 * `"O(1,-1)"` or `"Q"`. A `cutoff` of 0 selects the default. `len` must be
 * at least `max_degree + 1`.
 *
 * # Safety
 * `source` and `target` must be NUL-terminated strings; `out` must point to
 * `len` writable `size_t` values.
 */
enum CpStatus cp_ext_dims(const char *source,
                          const char *target,
                          size_t max_degree,
                          size_t cutoff,
                          size_t *out,
                          size_t len);

/**
 * Writes `h^0, h^1, h^2` of `O(m, n)` on the ruled surface `P(O ⊕ O(a))` to `out[0..3]`.
 *
 * # Safety
 * `out` must point to 3 writable `size_t` values.
 */
enum CpStatus cp_cohomology_ruled(int64_t a, int64_t m, int64_t n, size_t *out);

/**
 * Creates the six-object threefold collection from the shipped tables.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CpStatus cp_lattice_paper(struct CpLattice **out);

/**
 * Creates a collection from a row-major `n × n` Gram matrix, labelled `X0, X1, …`.
 *
 * # Safety
 * `gram` must point to `n * n` readable values and `out` to a handle slot.
 */
enum CpStatus cp_lattice_from_gram(const int64_t *gram, size_t n, struct CpLattice **out);

/**
 * Number of objects, or 0 for a null handle.
 *
 * # Safety
 * `lat` must be null or a live handle.
 */
size_t cp_lattice_size(const struct CpLattice *lat);

/**
 * Writes `χ(object i, object j)` to `out`.
 *
 * # Safety
 * `lat` must be a live handle and `out` a writable pointer.
 */
enum CpStatus cp_lattice_gram_entry(const struct CpLattice *lat, size_t i, size_t j, int64_t *out);

/**
 * Replaces objects `i, i+1` by their left mutation. On failure the handle is unchanged.
 *
 * # Safety
 * `lat` must be a live handle.
 */
enum CpStatus cp_lattice_left_mutate(struct CpLattice *lat, size_t i);

/**
 * Replaces objects `i, i+1` by their right mutation. On failure the handle is unchanged.
 *
 * # Safety
 * `lat` must be a live handle.
 */
enum CpStatus cp_lattice_right_mutate(struct CpLattice *lat, size_t i);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `lat` must be null or a handle not freed before.
 */
void cp_lattice_free(struct CpLattice *lat);

/**
 * The last error message on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *cp_last_error(void);

/**
 * Library version as a static string.
 */
const char *cp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPINF_H */
