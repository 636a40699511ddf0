#ifndef HADOF_H
#define HADOF_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HadofStatus {
  HADOF_STATUS_OK = 0,
  HADOF_STATUS_NULL_POINTER = 1,
  HADOF_STATUS_INVALID_ARGUMENT = 2,
  HADOF_STATUS_PARSE_ERROR = 3,
  HADOF_STATUS_CAP_EXCEEDED = 4,
  HADOF_STATUS_IO_ERROR = 5,
  HADOF_STATUS_BUFFER_TOO_SMALL = 6,
  HADOF_STATUS_PANIC = 7,
} HadofStatus;

typedef enum HadofSolver {
  HADOF_SOLVER_QAOA = 0,
  HADOF_SOLVER_SA = 1,
} HadofSolver;

typedef enum HadofUpdateMode {
  HADOF_UPDATE_MODE_IN_SWEEP = 0,
  HADOF_UPDATE_MODE_SNAPSHOT = 1,
} HadofUpdateMode;

/**
 * Opaque QUBO problem.
 */
typedef struct HadofQubo HadofQubo;

/**
 * Opaque result of one decomposition run.
 */
typedef struct HadofRun HadofRun;

/**
 * Plain-data mirror of the engine configuration.
 */
typedef struct HadofRunConfig {
  size_t k;
  size_t p;
  /**
   * 0 selects exact marginals (QAOA only).
   */
  size_t marginal_shots;
  size_t final_shots;
  enum HadofSolver solver;
  enum HadofUpdateMode update_mode;
  uint64_t seed;
  size_t sa_sweeps_per_stage;
  double sa_beta_hot;
  double sa_beta_cold;
} HadofRunConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next hadof call on the same thread.
 */
const char *hadof_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void hadof_string_free(char *s);

enum HadofStatus hadof_qubo_new(size_t n, struct HadofQubo **out);

/**
 * Random instance with entries uniform on `[lo, hi)`; identical to the
 * `hadof gen` output for the same seed.
 */
enum HadofStatus hadof_qubo_random(size_t n,
                                   uint64_t seed,
                                   double lo,
                                   double hi,
                                   struct HadofQubo **out);

/**
 * Parses the `qubo <n>` text format from a NUL-terminated UTF-8 string.
 */
enum HadofStatus hadof_qubo_parse(const char *text, struct HadofQubo **out);

/**
 * Writes the text format into a new string; release it with
 * [`hadof_string_free`].
 */
enum HadofStatus hadof_qubo_serialize(const struct HadofQubo *q, char **out);

void hadof_qubo_free(struct HadofQubo *q);

/**
 * Variable count, or 0 for a NULL handle.
 */
size_t hadof_qubo_n(const struct HadofQubo *q);

enum HadofStatus hadof_qubo_set(struct HadofQubo *q, size_t i, size_t j, double value);

/**
 * `Q_ij` for `i <= j`, 0 below the diagonal.
 */
enum HadofStatus hadof_qubo_get(const struct HadofQubo *q, size_t i, size_t j, double *out);

/**
 * Objective of a 0/1 byte array of length `len`.
 */
enum HadofStatus hadof_qubo_evaluate(const struct HadofQubo *q,
                                     const uint8_t *bits,
                                     size_t len,
                                     double *out);

/**
 * Exhaustive minimum (n <= 24). The minimiser is written to `bits`.
 */
enum HadofStatus hadof_brute_force(const struct HadofQubo *q,
                                   uint8_t *bits,
                                   size_t len,
                                   double *objective);

/**
 * Default configuration: k = 5, p = 10, 500 marginal shots, 5000 final
 * shots, QAOA sub-solver, in-sweep updates, seed 0.
 */
struct HadofRunConfig hadof_config_default(void);

enum HadofStatus hadof_run(const struct HadofQubo *q,
                           const struct HadofRunConfig *config,
                           struct HadofRun **out);

void hadof_run_free(struct HadofRun *r);

/**
 * Number of global samples, or 0 for a NULL handle.
 */
size_t hadof_run_num_samples(const struct HadofRun *r);

/**
 * Variable count of the solved problem, or 0 for a NULL handle.
 */
size_t hadof_run_n(const struct HadofRun *r);

enum HadofStatus hadof_run_best(const struct HadofRun *r,
                                uint8_t *bits,
                                size_t len,
                                double *objective);

enum HadofStatus hadof_run_most_probable(const struct HadofRun *r,
                                         uint8_t *bits,
                                         size_t len,
                                         double *objective);

enum HadofStatus hadof_run_average_objective(const struct HadofRun *r, double *out);

enum HadofStatus hadof_run_wall_time(const struct HadofRun *r, double *out);

/**
 * Global sample `index` in sampling order.
 */
enum HadofStatus hadof_run_sample(const struct HadofRun *r,
                                  size_t index,
                                  uint8_t *bits,
                                  size_t len,
                                  double *objective);

/**
 * Marginals after the last sweep, `n` doubles.
 */
enum HadofStatus hadof_run_marginals(const struct HadofRun *r, double *out, size_t len);

/**
 * Summary JSON (statistics, configuration, trajectory); release with
 * [`hadof_string_free`].
 */
enum HadofStatus hadof_run_to_json(const struct HadofRun *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HADOF_H */
