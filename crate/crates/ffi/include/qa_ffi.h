/* C interface to the qa workbench. Strings are UTF-8 and freed with qa_string_free. */

#ifndef QA_FFI_H
#define QA_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirrored by the generated header.
 */
typedef enum QaStatus {
  QaStatus_Ok = 0,
  /**
   * Invalid input: bad type spelling, bad arguments, contract violation.
   */
  QaStatus_DomainError = 2,
  /**
   * The value exists but is not reachable by the implemented computation.
   */
  QaStatus_Infeasible = 3,
  /**
   * A null pointer was passed where a value was required.
   */
  QaStatus_NullArgument = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  QaStatus_InvalidUtf8 = 5,
  /**
   * An internal panic was caught; see `qa_last_error`.
   */
  QaStatus_Internal = 6,
} QaStatus;

/**
 * Opaque handle: cell layer over one dominant weight.
 */
typedef struct QaCells QaCells;

/**
 * Opaque handle: symbolic engine for the positive half.
 */
typedef struct QaEngine QaEngine;

/**
 * Opaque handle: numerical data of one affine diagram.
 */
typedef struct QaRootDatum QaRootDatum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the most recent error message on this thread, or NULL when no
 * error has been recorded. Free with `qa_string_free`.
 */
char *qa_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by one of the string-producing
 * functions here, not yet freed; NULL is accepted and ignored.
 */
void qa_string_free(char *s);

/**
 * Build the root datum of an affine diagram from its spelling, e.g.
 * "A2~2". On success writes a handle the caller must release with
 * `qa_root_datum_free`.
 *
 * # Safety
 * `type_spelling` must point to a NUL-terminated string; `out` must be a
 * valid writable pointer.
 */
enum QaStatus qa_root_datum_new(const char *type_spelling, struct QaRootDatum **out);

/**
 * # Safety
 * `handle` must come from `qa_root_datum_new` and not be freed twice.
 */
void qa_root_datum_free(struct QaRootDatum *handle);

/**
 * Classical rank of the datum, or -1 on a null handle.
 *
 * # Safety
 * `handle` must be a live handle from `qa_root_datum_new` or NULL.
 */
int32_t qa_root_datum_rank(const struct QaRootDatum *handle);

/**
 * JSON description of the datum (exact rational entries as strings).
 *
 * # Safety
 * `handle` must be live; `out` valid and writable.
 */
enum QaStatus qa_root_datum_json(const struct QaRootDatum *handle, char **out);

/**
 * Build the symbolic engine for a datum.
 *
 * # Safety
 * `handle` must be live; `out` valid and writable.
 */
enum QaStatus qa_engine_new(const struct QaRootDatum *handle, struct QaEngine **out);

/**
 * # Safety
 * `handle` must come from `qa_engine_new` and not be freed twice.
 */
void qa_engine_free(struct QaEngine *handle);

/**
 * Value of the characterizing bilinear form on two element expressions
 * (grammar: `E0*E1 - q^-2*E1*E0`). Writes the exact rational-function
 * string.
 *
 * # Safety
 * `handle` must be live; `x`, `y` NUL-terminated; `out` writable.
 */
enum QaStatus qa_form(const struct QaEngine *handle, const char *x, const char *y, char **out);

/**
 * Root `beta_k` of the fixed doubly infinite sequence, as a JSON array of
 * simple-root coordinates.
 *
 * # Safety
 * `handle` must be live; `out` writable.
 */
enum QaStatus qa_beta(const struct QaEngine *handle, int64_t k, char **out);

/**
 * Canonical basis at a weight (comma-separated simple-root coordinates) in
 * a frame, as JSON. Infeasible frames report status 3.
 *
 * # Safety
 * `handle` must be live; `weight_csv` NUL-terminated; `out` writable.
 */
enum QaStatus qa_canonical_basis_json(const struct QaEngine *handle,
                                      const char *weight_csv,
                                      int64_t frame,
                                      char **out);

/**
 * Build the cell layer for a dominant weight given as a comma-separated
 * list of fundamental multiplicities.
 *
 * # Safety
 * `handle` must be live; `lambda_csv` NUL-terminated; `out` writable.
 */
enum QaStatus qa_cells_new(const struct QaRootDatum *handle,
                           const char *lambda_csv,
                           struct QaCells **out);

/**
 * # Safety
 * `handle` must come from `qa_cells_new` and not be freed twice.
 */
void qa_cells_free(struct QaCells *handle);

/**
 * Size of the diagonal trivial-triple set.
 *
 * # Safety
 * `handle` must be live; `out` valid and writable.
 */
enum QaStatus qa_cells_d_count(const struct QaCells *handle, uint64_t *out);

/**
 * Cell partition on the truncated basis as JSON; under-truncation reports
 * status 3 without writing output.
 *
 * # Safety
 * `handle` must be live; `out` writable.
 */
enum QaStatus qa_cells_partition_json(const struct QaCells *handle,
                                      uint64_t max_boxes,
                                      int64_t max_det,
                                      char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QA_FFI_H */
