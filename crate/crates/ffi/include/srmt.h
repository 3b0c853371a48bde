#ifndef SRMT_H
#define SRMT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The non-zero values match the exit codes of `srmt`.
 */
typedef enum SrmtStatus {
  SRMT_STATUS_OK = 0,
  SRMT_STATUS_NULL_POINTER = 1,
  SRMT_STATUS_INVALID_INPUT = 2,
  SRMT_STATUS_IO = 3,
  SRMT_STATUS_NUMERICAL = 4,
  SRMT_STATUS_PANIC = 5,
} SrmtStatus;

typedef enum SrmtEnsemble {
  SRMT_ENSEMBLE_TOEPLITZ_REAL = 0,
  SRMT_ENSEMBLE_TOEPLITZ_COMPLEX = 1,
  SRMT_ENSEMBLE_HANKEL = 2,
  SRMT_ENSEMBLE_TH_SPECIAL_PLUS = 3,
  SRMT_ENSEMBLE_TH_SPECIAL_MINUS = 4,
  SRMT_ENSEMBLE_TH_INDEPENDENT_REAL = 5,
  SRMT_ENSEMBLE_TH_INDEPENDENT_COMPLEX = 6,
  SRMT_ENSEMBLE_GOE = 7,
  SRMT_ENSEMBLE_GUE = 8,
} SrmtEnsemble;

/**
 * Opaque batch of sorted spectra.
 */
typedef struct SrmtBatch SrmtBatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL.
 */
const char *srmt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *srmt_version(void);

/**
 * Samples `count` matrices of size `dim` and stores their spectra.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SrmtStatus srmt_batch_simulate(enum SrmtEnsemble ensemble,
                                    size_t dim,
                                    size_t count,
                                    uint64_t seed,
                                    struct SrmtBatch **out);

/**
 * Reads a batch directory written by `srmt gen` or `srmt_batch_write`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SrmtStatus srmt_batch_read(const char *dir, struct SrmtBatch **out);

/**
 * Writes the batch in the on-disk batch format.
 *
 * # Safety
 * `batch` must be a live handle and `dir` a NUL-terminated string.
 */
enum SrmtStatus srmt_batch_write(const struct SrmtBatch *batch, const char *dir);

/**
 * # Safety
 * `batch` must be a live handle or NULL.
 */
size_t srmt_batch_dim(const struct SrmtBatch *batch);

/**
 * # Safety
 * `batch` must be a live handle or NULL.
 */
size_t srmt_batch_count(const struct SrmtBatch *batch);

/**
 * Copies all eigenvalues, row by row, into `buf` of length `len`
 * (at least `dim * count`).
 *
 * # Safety
 * `batch` must be a live handle and `buf` valid for `len` writes.
 */
enum SrmtStatus srmt_batch_copy_values(const struct SrmtBatch *batch, double *buf, size_t len);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `batch` must come from this library and not be used afterwards.
 */
void srmt_batch_free(struct SrmtBatch *batch);

/**
 * Maximum-likelihood `gamma_n` from the unfolded, windowed batch.
 *
 * # Safety
 * `batch` must be a live handle; `gamma` and `stderr` valid pointers.
 */
enum SrmtStatus srmt_fit_gamma(const struct SrmtBatch *batch,
                               size_t n,
                               double *gamma,
                               double *stderr);

/**
 * Compressibility from the tapered form factor.
 *
 * # Safety
 * `batch` must be a live handle; `chi` and `stderr` valid pointers.
 */
enum SrmtStatus srmt_compressibility(const struct SrmtBatch *batch, double *chi, double *stderr);

/**
 * Gamma surmise density with mean `n + 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SrmtStatus srmt_gamma_pdf(size_t n, double gamma_n, double s, double *out);

/**
 * Form factor of the law `gamma_n = p n + k` at `tau > 0`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SrmtStatus srmt_form_factor(double p, double k, double tau, double *out);

/**
 * Zero modes of the order-`n` degeneracy conditions.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SrmtStatus srmt_zero_modes(enum SrmtEnsemble ensemble, size_t n, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRMT_H */
