#ifndef LBM_H
#define LBM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LbmStatus {
  LBM_STATUS_OK = 0,
  LBM_STATUS_NULL_POINTER = 1,
  LBM_STATUS_INVALID_UTF8 = 2,
  LBM_STATUS_PARSE = 3,
  LBM_STATUS_INVALID_ARGUMENT = 4,
  LBM_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * An enumeration or clause-count guard refused the request.
   */
  LBM_STATUS_GUARD = 6,
  /**
   * The knowledge base has no satisfying assignment.
   */
  LBM_STATUS_UNSATISFIABLE = 7,
  LBM_STATUS_IO = 8,
  LBM_STATUS_OUT_OF_RANGE = 9,
  LBM_STATUS_PANIC = 10,
} LbmStatus;

/**
 * A compiled model together with its variable names.
 */
typedef struct LbmModel LbmModel;

/**
 * Assignments returned by [`lbm_solve`] or [`lbm_rank`].
 */
typedef struct LbmSolutions LbmSolutions;

typedef struct LbmSolveOptions {
  uint64_t seed;
  uint64_t max_samples;
  uint64_t burn_in;
  size_t chains;
  double temperature;
  double confidence;
  /**
   * Stop once this many distinct assignments are accepted; 0 for no target.
   */
  size_t target;
} LbmSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lbm_last_error(void);

/**
 * Compiles knowledge-base text (`[weight :] formula` per line) with
 * unit default weight.
 *
 * # Safety
 * `kb` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LbmStatus lbm_model_compile(const char *kb, double epsilon, struct LbmModel **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LbmStatus lbm_model_load(const char *path, struct LbmModel **out);

/**
 * # Safety
 * `model` must come from this library; `path` must be NUL-terminated.
 */
enum LbmStatus lbm_model_save(const struct LbmModel *model, const char *path);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void lbm_model_free(struct LbmModel *model);

/**
 * # Safety
 * `model` must be null or come from this library.
 */
size_t lbm_model_n_visible(const struct LbmModel *model);

/**
 * # Safety
 * `model` must be null or come from this library.
 */
size_t lbm_model_n_hidden(const struct LbmModel *model);

/**
 * Index of the variable called `name`.
 *
 * # Safety
 * `model` must come from this library, `name` must be NUL-terminated and
 * `out` valid.
 */
enum LbmStatus lbm_model_var_index(const struct LbmModel *model, const char *name, size_t *out);

/**
 * Minimum of the energy over hidden states for the assignment `x`.
 *
 * # Safety
 * `x` must point to `len` readable bytes; `out` must be valid.
 */
enum LbmStatus lbm_model_min_energy(const struct LbmModel *model,
                                    const uint8_t *x,
                                    size_t len,
                                    double *out);

/**
 * Free energy of `x` at confidence `c`.
 *
 * # Safety
 * `x` must point to `len` readable bytes; `out` must be valid.
 */
enum LbmStatus lbm_model_free_energy(const struct LbmModel *model,
                                     const uint8_t *x,
                                     size_t len,
                                     double c,
                                     double *out);

struct LbmSolveOptions lbm_solve_options_default(void);

/**
 * Gibbs search for assignments whose free energy passes the acceptance
 * threshold. Results are in assignment order.
 *
 * # Safety
 * `clamp` is null or points to `clamp_len` bytes; `opts` is null (defaults)
 * or valid; `out` must be valid.
 */
enum LbmStatus lbm_solve(const struct LbmModel *model,
                         const int8_t *clamp,
                         size_t clamp_len,
                         const struct LbmSolveOptions *opts,
                         struct LbmSolutions **out);

/**
 * Every completion of the evidence, ordered by free energy at confidence
 * `c`, with its posterior probability.
 *
 * # Safety
 * As for [`lbm_solve`].
 */
enum LbmStatus lbm_rank(const struct LbmModel *model,
                        const int8_t *clamp,
                        size_t clamp_len,
                        double c,
                        struct LbmSolutions **out);

/**
 * # Safety
 * `s` must be null or come from this library.
 */
size_t lbm_solutions_len(const struct LbmSolutions *s);

/**
 * Samples drawn by the search that produced `s`; 0 for ranked results.
 *
 * # Safety
 * `s` must be null or come from this library.
 */
uint64_t lbm_solutions_samples_drawn(const struct LbmSolutions *s);

/**
 * Copies row `k` into `bits_out` (exactly `n_visible` bytes). Either of
 * `free_energy` and `probability` may be null; probability is NaN for
 * search results.
 *
 * # Safety
 * `bits_out` must point to `bits_len` writable bytes.
 */
enum LbmStatus lbm_solutions_get(const struct LbmSolutions *s,
                                 size_t k,
                                 uint8_t *bits_out,
                                 size_t bits_len,
                                 double *free_energy,
                                 double *probability);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void lbm_solutions_free(struct LbmSolutions *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LBM_H */
