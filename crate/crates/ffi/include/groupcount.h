#ifndef GROUPCOUNT_H
#define GROUPCOUNT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcEstimate {
  GC_ESTIMATE_CYCLIC = 0,
  GC_ESTIMATE_STRICTLY_ABELIAN = 1,
  GC_ESTIMATE_STRICTLY_NILPOTENT = 2,
} GcEstimate;

typedef enum GcFamily {
  /**
   * Γ(1+w) coefficients.
   */
  GC_FAMILY_UPPER_C = 0,
  /**
   * Γ(2+w) coefficients.
   */
  GC_FAMILY_UPPER_D = 1,
  GC_FAMILY_LOWER_C = 2,
  GC_FAMILY_LOWER_B = 3,
  GC_FAMILY_LOWER_D = 4,
} GcFamily;

typedef enum GcNumberClass {
  GC_NUMBER_CLASS_CYCLIC = 0,
  GC_NUMBER_CLASS_STRICTLY_ABELIAN = 1,
  GC_NUMBER_CLASS_STRICTLY_NILPOTENT = 2,
  GC_NUMBER_CLASS_NOT_NILPOTENT = 3,
} GcNumberClass;

typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_POINTER = 1,
  GC_STATUS_DOMAIN = 2,
  GC_STATUS_RESOURCE = 3,
  GC_STATUS_CONFIG = 4,
  GC_STATUS_PRECONDITION = 5,
  GC_STATUS_OVERFLOW = 6,
  GC_STATUS_NUMERIC = 7,
  GC_STATUS_DATA = 8,
  GC_STATUS_IO = 9,
  GC_STATUS_PANIC = 10,
} GcStatus;

/**
 * Opaque coefficient series.
 */
typedef struct GcSeries GcSeries;

/**
 * Opaque smallest-prime-factor table.
 */
typedef struct GcSpfTable GcSpfTable;

typedef struct GcClassCounts {
  uint64_t cyclic;
  uint64_t strictly_abelian;
  uint64_t strictly_nilpotent;
  uint64_t not_nilpotent;
  uint64_t total;
} GcClassCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t gc_last_error(char *buf, size_t len);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void gc_string_free(char *s);

/**
 * Classifies n ≥ 1.
 *
 * # Safety
 * `class_out` must be valid for writes.
 */
enum GcStatus gc_classify(uint64_t n, enum GcNumberClass *class_out);

/**
 * φ(n) for n ≥ 1.
 *
 * # Safety
 * `phi_out` must be valid for writes.
 */
enum GcStatus gc_euler_phi(uint64_t n, uint64_t *phi_out);

/**
 * ψ(n) as a decimal string; free it with [`gc_string_free`].
 *
 * # Safety
 * `psi_out` must be valid for writes.
 */
enum GcStatus gc_psi_string(uint64_t n, char **psi_out);

/**
 * Builds a smallest-prime-factor table for 2..=limit.
 *
 * # Safety
 * `table_out` must be valid for writes.
 */
enum GcStatus gc_spf_new(uint64_t limit, struct GcSpfTable **table_out);

/**
 * # Safety
 * `table` must be a live handle and `spf_out` valid for writes.
 */
enum GcStatus gc_spf_smallest_factor(const struct GcSpfTable *table, uint64_t n, uint64_t *spf_out);

/**
 * Classifies n ≤ the table limit using the table for factorization.
 *
 * # Safety
 * `table` must be a live handle and `class_out` valid for writes.
 */
enum GcStatus gc_spf_classify(const struct GcSpfTable *table,
                              uint64_t n,
                              enum GcNumberClass *class_out);

/**
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void gc_spf_free(struct GcSpfTable *table);

/**
 * Class counts over [1, limit]. `threads` = 0 uses every processor;
 * the result does not depend on it.
 *
 * # Safety
 * `counts_out` must be valid for writes.
 */
enum GcStatus gc_count(uint64_t limit, uint32_t threads, struct GcClassCounts *counts_out);

/**
 * Computes one coefficient family to `order`.
 *
 * # Safety
 * `series_out` must be valid for writes.
 */
enum GcStatus gc_series_new(enum GcFamily family, uint32_t order, struct GcSeries **series_out);

/**
 * # Safety
 * `series` must be a live handle and `order_out` valid for writes.
 */
enum GcStatus gc_series_order(const struct GcSeries *series, uint32_t *order_out);

/**
 * Coefficient k in canonical symbolic form; free with [`gc_string_free`].
 *
 * # Safety
 * `series` must be a live handle and `text_out` valid for writes.
 */
enum GcStatus gc_series_symbolic(const struct GcSeries *series, uint32_t k, char **text_out);

/**
 * Coefficient k to `digits` significant digits (at most 50).
 *
 * # Safety
 * `series` must be a live handle and `text_out` valid for writes.
 */
enum GcStatus gc_series_numeric(const struct GcSeries *series,
                                uint32_t k,
                                uint32_t digits,
                                char **text_out);

/**
 * # Safety
 * `series` must be null or a handle not yet freed.
 */
void gc_series_free(struct GcSeries *series);

/**
 * Truncated expansion at x. Pass NaN for `synthetic_l` to use log log log x.
 *
 * # Safety
 * `value_out` must be valid for writes.
 */
enum GcStatus gc_estimate(enum GcEstimate which,
                          double x,
                          uint32_t order,
                          double synthetic_l,
                          double *value_out);

/**
 * Γ^{(k)}(s) for k ≤ 12 and s ∈ {1, 2}, by quadrature.
 *
 * # Safety
 * `value_out` must be valid for writes.
 */
enum GcStatus gc_gamma_derivative(uint32_t k, uint32_t s, double *value_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUPCOUNT_H */
