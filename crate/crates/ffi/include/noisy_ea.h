#ifndef NOISY_EA_H
#define NOISY_EA_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NeaStatus {
  NEA_STATUS_OK = 0,
  NEA_STATUS_NULL_POINTER = 1,
  NEA_STATUS_INVALID_ARGUMENT = 2,
  NEA_STATUS_SUPPORT_TOO_LARGE = 3,
  NEA_STATUS_IO = 4,
  NEA_STATUS_BUFFER_TOO_SMALL = 5,
  NEA_STATUS_PANIC = 6,
} NeaStatus;

typedef enum NeaProblem {
  NEA_PROBLEM_ONE_MAX = 0,
  NEA_PROBLEM_LEADING_ONES = 1,
} NeaProblem;

typedef enum NeaNoiseKind {
  NEA_NOISE_KIND_NONE = 0,
  NEA_NOISE_KIND_ONE_BIT = 1,
  NEA_NOISE_KIND_BIT_WISE = 2,
} NeaNoiseKind;

/**
 * Opaque sweep configuration plus, once run, its rows.
 */
typedef struct NeaExperiment NeaExperiment;

/**
 * Opaque law of a noisy fitness value.
 */
typedef struct NeaPmf NeaPmf;

/**
 * `q` is ignored unless `kind` is bit-wise.
 */
typedef struct NeaNoise {
  enum NeaNoiseKind kind;
  double p;
  double q;
} NeaNoise;

typedef struct NeaRunConfig {
  enum NeaProblem problem;
  size_t n;
  struct NeaNoise noise;
  /**
   * Sample size, at least 1.
   */
  uint64_t m;
  /**
   * 0 selects the library default.
   */
  uint64_t max_evaluations;
  uint64_t seed;
  /**
   * Count the first evaluation of an optimal offspring as the hit.
   */
  bool hit_on_evaluation;
} NeaRunConfig;

typedef struct NeaRunResult {
  uint64_t iterations;
  uint64_t evaluations;
  bool hit;
  bool censored;
  size_t final_true_fitness;
  uint64_t seed;
} NeaRunResult;

typedef struct NeaComparison {
  double p_ge;
  double p_gt;
  double p_eq;
} NeaComparison;

typedef struct NeaCondition {
  bool satisfied;
  double margin;
  bool parameters_in_range;
} NeaCondition;

/**
 * Mirrors one CSV row. `q` is NaN for one-bit noise.
 */
typedef struct NeaResultRow {
  size_t n;
  double p;
  double q;
  uint64_t m;
  uint64_t runs;
  uint64_t hits;
  uint64_t censored;
  double mean_evaluations;
  double median_evaluations;
  double stddev_evaluations;
  double normalized;
  uint64_t master_seed;
} NeaResultRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nea_version(void);

/**
 * Message of the last failure on this thread, or null if none. Valid until
 * the next failing call on the same thread.
 */
const char *nea_last_error(void);

/**
 * # Safety
 * `bits` must point to `n` readable bytes; `out` must be writable.
 */
enum NeaStatus nea_true_fitness(enum NeaProblem p, const uint8_t *bits_ptr, size_t n, size_t *out);

/**
 * One run of the (1+1)-EA.
 *
 * # Safety
 * `config` must be readable and `out` writable.
 */
enum NeaStatus nea_run(const struct NeaRunConfig *config, struct NeaRunResult *out);

/**
 * Exact law of the noisy fitness of `bits`. Release with [`nea_pmf_free`].
 *
 * # Safety
 * `bits` must point to `n` readable bytes; `out` must be writable.
 */
enum NeaStatus nea_pmf_new(enum NeaProblem p,
                           const uint8_t *bits_ptr,
                           size_t n,
                           struct NeaNoise noise_model,
                           struct NeaPmf **out);

/**
 * Law of the sum of `m` independent copies.
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be writable.
 */
enum NeaStatus nea_pmf_m_fold(const struct NeaPmf *pmf, uint64_t m, struct NeaPmf **out);

/**
 * # Safety
 * `pmf` must be null or a handle not yet freed.
 */
void nea_pmf_free(struct NeaPmf *pmf);

/**
 * Number of support points `0..=max`, i.e. `max + 1`; 0 for null.
 *
 * # Safety
 * `pmf` must be null or a live handle.
 */
size_t nea_pmf_len(const struct NeaPmf *pmf);

/**
 * Copies the masses into `buf`. Fails with `BUFFER_TOO_SMALL` if `len` is
 * below [`nea_pmf_len`].
 *
 * # Safety
 * `pmf` must be a live handle; `buf` must hold `len` doubles.
 */
enum NeaStatus nea_pmf_masses(const struct NeaPmf *pmf, double *buf, size_t len);

/**
 * # Safety
 * `pmf` must be a live handle; `out` must be writable.
 */
enum NeaStatus nea_pmf_mean(const struct NeaPmf *pmf, double *out);

/**
 * `P(A >= B)`, `P(A > B)`, `P(A == B)` for independent `A ~ a`, `B ~ b`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum NeaStatus nea_compare(const struct NeaPmf *a,
                           const struct NeaPmf *b,
                           struct NeaComparison *out);

/**
 * Probability that `offspring` replaces `parent` with sample size `m`.
 *
 * # Safety
 * Both bit arrays must hold `n` bytes; `out` must be writable.
 */
enum NeaStatus nea_acceptance_probability(enum NeaProblem p,
                                          const uint8_t *parent,
                                          const uint8_t *offspring,
                                          size_t n,
                                          struct NeaNoise noise_model,
                                          uint64_t m,
                                          double *out);

/**
 * Improvement hypothesis on LeadingOnes prefix states.
 *
 * # Safety
 * `out` must be writable.
 */
enum NeaStatus nea_check_lemma4(size_t n,
                                struct NeaNoise noise_model,
                                uint64_t m,
                                double c,
                                double l,
                                struct NeaCondition *out);

/**
 * Bounded-progress hypothesis near the optimum.
 *
 * # Safety
 * `out` must be writable.
 */
enum NeaStatus nea_check_lemma5(size_t n,
                                struct NeaNoise noise_model,
                                uint64_t m,
                                double c,
                                double l,
                                struct NeaCondition *out);

/**
 * Smallest expected-fitness gap between a prefix state and any shorter one.
 *
 * # Safety
 * `out` must be writable.
 */
enum NeaStatus nea_sampling_gap(size_t n, struct NeaNoise noise_model, double *out);

/**
 * Parses a key=value sweep configuration. Release with
 * [`nea_experiment_free`].
 *
 * # Safety
 * `config_text` must be a NUL-terminated string; `out` must be writable.
 */
enum NeaStatus nea_experiment_parse(const char *config_text, struct NeaExperiment **out);

/**
 * Overrides one configuration key, as `--set key=value` does on the CLI.
 *
 * # Safety
 * `exp` must be a live handle; `key` and `value` NUL-terminated.
 */
enum NeaStatus nea_experiment_set(struct NeaExperiment *exp, const char *key, const char *value);

/**
 * Runs the sweep on `workers` threads, replacing any earlier rows.
 *
 * # Safety
 * `exp` must be a live handle.
 */
enum NeaStatus nea_experiment_run(struct NeaExperiment *exp, size_t workers);

/**
 * # Safety
 * `exp` must be null or a live handle.
 */
size_t nea_experiment_row_count(const struct NeaExperiment *exp);

/**
 * # Safety
 * `exp` must be a live handle; `out` must be writable.
 */
enum NeaStatus nea_experiment_row(const struct NeaExperiment *exp,
                                  size_t index,
                                  struct NeaResultRow *out);

/**
 * Writes the rows as CSV to `path`.
 *
 * # Safety
 * `exp` must be a live handle; `path` NUL-terminated.
 */
enum NeaStatus nea_experiment_write_csv(const struct NeaExperiment *exp, const char *path);

/**
 * The rows as CSV text. Release with [`nea_string_free`].
 *
 * # Safety
 * `exp` must be a live handle; `out` must be writable.
 */
enum NeaStatus nea_experiment_csv(const struct NeaExperiment *exp, char **out);

/**
 * # Safety
 * `exp` must be null or a handle not yet freed.
 */
void nea_experiment_free(struct NeaExperiment *exp);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void nea_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOISY_EA_H */
