#ifndef COUNTERFACT_H
#define COUNTERFACT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Parse-level problems map to `CfStatusParseError` and
 * semantic problems (zero-probability evidence, caps, unsupported
 * combinations) to `CfStatusSemanticError`, mirroring the command-line
 * exit codes 2 and 3.
 */
typedef enum CfStatus {
  CfStatusOk = 0,
  CfStatusParseError = 2,
  CfStatusSemanticError = 3,
  CfStatusNullPointer = 4,
  CfStatusInvalidUtf8 = 5,
} CfStatus;

/**
 * Opaque model handle. Holds either a causal model or a structural model.
 */
typedef struct CfModel CfModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent failure on this thread. Borrowed; valid
 * until the next failing call on the same thread.
 */
const char *cf_last_error(void);

/**
 * Parses a causal-model TOML document into a handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer. The
 * returned handle must be freed with [`cf_model_free`].
 */
enum CfStatus cf_model_parse(const char *text, struct CfModel **out);

/**
 * Parses a structural-model TOML document into a handle.
 *
 * # Safety
 * As [`cf_model_parse`].
 */
enum CfStatus cf_scm_parse(const char *text, struct CfModel **out);

/**
 * Frees a handle returned by [`cf_model_parse`] or [`cf_scm_parse`].
 *
 * # Safety
 * `model` must be a handle from this library, not yet freed. Null is a
 * no-op.
 */
void cf_model_free(struct CfModel *model);

/**
 * Evaluates `query` under `semantics` (one of "B", "N", "GH", "IC",
 * "SCM", "BOUNDS"). On success `*out_lo` receives the exact value as an
 * `"a/b"` string; for interval results `*out_hi` receives the upper end,
 * otherwise it is set to null. Both strings are freed with
 * [`cf_string_free`].
 *
 * # Safety
 * `model` must be a live handle; `query` and `semantics` NUL-terminated
 * strings; `out_lo` and `out_hi` valid pointers.
 */
enum CfStatus cf_eval(const struct CfModel *model,
                      const char *query,
                      const char *semantics,
                      char **out_lo,
                      char **out_hi);

/**
 * Checks whether the model's joint distribution is Markov relative to its
 * graph; writes 1 or 0 into `*out_holds`.
 *
 * # Safety
 * `model` must be a live handle and `out_holds` a valid pointer.
 */
enum CfStatus cf_markov_holds(const struct CfModel *model, uint8_t *out_holds);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must originate from this library and not have been freed. Null is a
 * no-op.
 */
void cf_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* COUNTERFACT_H */
