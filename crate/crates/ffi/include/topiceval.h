#ifndef TOPICEVAL_H
#define TOPICEVAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TeStatus {
  TE_STATUS_OK = 0,
  TE_STATUS_NULL_POINTER = 1,
  TE_STATUS_INVALID_UTF8 = 2,
  TE_STATUS_IO = 3,
  TE_STATUS_PARSE = 4,
  TE_STATUS_LOAD = 5,
  TE_STATUS_DATA = 6,
  TE_STATUS_CONFIG = 7,
  TE_STATUS_SHAPE = 8,
  TE_STATUS_MISSING_TOPIC = 9,
  /**
   * Too few points for a statistic.
   */
  TE_STATUS_INSUFFICIENT = 10,
  /**
   * Statistic undefined, e.g. zero rank variance.
   */
  TE_STATUS_UNDEFINED = 11,
  TE_STATUS_BUFFER_TOO_SMALL = 12,
  TE_STATUS_PANIC = 13,
} TeStatus;

/**
 * Opaque handle to a loaded DAN or ADAN classifier.
 */
typedef struct TeModel TeModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *te_version(void);

/**
 * Copy of the calling thread's last error message, or NULL if the last
 * call succeeded. Free with `te_string_free`.
 */
char *te_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void te_string_free(char *s);

/**
 * Loads a model file and stores a new handle in `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TeStatus te_model_load(const char *path, struct TeModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from `te_model_load`, not yet freed.
 */
void te_model_free(struct TeModel *model);

/**
 * Number of topic labels of the model.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum TeStatus te_model_num_labels(const struct TeModel *model, size_t *out);

/**
 * Topic probabilities of `text`, written to `probs[0..len]`. `len` must
 * equal the number of labels.
 *
 * # Safety
 * `model` must be a live handle, `text` NUL-terminated and `probs` valid
 * for `len` writes.
 */
enum TeStatus te_model_probs(const struct TeModel *model,
                             const char *text,
                             double *probs,
                             size_t len);

/**
 * Prediction for `text` as a JSON object with `topic`, `probs`,
 * `normalized_entropy`, `keywords` (ADAN only) and `empty`.
 *
 * # Safety
 * `model` must be a live handle, `text` NUL-terminated, `out_json`
 * writable. Free the result with `te_string_free`.
 */
enum TeStatus te_model_predict(const struct TeModel *model,
                               const char *text,
                               size_t n_keywords,
                               char **out_json);

/**
 * Per-bot metrics for classified conversations given as JSONL text.
 * `canonical_topics` is a comma-separated list (may be empty). Either
 * output pointer may be NULL to skip that format.
 *
 * # Safety
 * String arguments must be NUL-terminated; non-NULL outputs writable.
 */
enum TeStatus te_metrics_report(const char *conversations_jsonl,
                                const char *canonical_topics,
                                char **out_json,
                                char **out_tsv);

/**
 * Correlates every metric column of a per-bot TSV with its `mean_rating`
 * column; the result is a TSV of `metric, rho, n_bots, status`.
 *
 * # Safety
 * `metrics_tsv` must be NUL-terminated; `out_tsv` writable.
 */
enum TeStatus te_correlate_tsv(const char *metrics_tsv, char **out_tsv);

/**
 * Spearman rank correlation with average ranks for ties.
 *
 * # Safety
 * `x` and `y` must be valid for `n` reads; `out` writable.
 */
enum TeStatus te_spearman(const double *x, const double *y, size_t n, double *out);

/**
 * Gradient check of a small random model (`"dan"` or `"adan"`); writes
 * the largest relative error.
 *
 * # Safety
 * `kind` must be NUL-terminated; `max_relative_error` writable.
 */
enum TeStatus te_gradcheck(const char *kind, uint64_t seed, double *max_relative_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPICEVAL_H */
