#ifndef TBDAG_H
#define TBDAG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  TB_STATUS_MALFORMED = 3,
  TB_STATUS_INVALID_GAME = 4,
  TB_STATUS_INVALID_PARAMS = 5,
  TB_STATUS_UNSUPPORTED = 6,
  TB_STATUS_BUDGET = 7,
  TB_STATUS_NON_FINITE = 8,
  TB_STATUS_IO = 9,
  TB_STATUS_PANIC = 10,
  TB_STATUS_BUFFER_TOO_SMALL = 11,
} TbStatus;

typedef enum TbSide {
  TB_SIDE_MAX = 0,
  TB_SIDE_MIN = 1,
} TbSide;

typedef enum TbSplit {
  TB_SPLIT_OBSERVATION = 0,
  TB_SPLIT_PUBLIC = 1,
} TbSplit;

typedef enum TbAlgorithm {
  TB_ALGORITHM_CFR = 0,
  TB_ALGORITHM_CFR_PLUS = 1,
  TB_ALGORITHM_PCFR_PLUS = 2,
  TB_ALGORITHM_CFR_MWU = 3,
} TbAlgorithm;

/**
 * Opaque game handle.
 */
typedef struct TbGame TbGame;

/**
 * Opaque solver result handle.
 */
typedef struct TbSolveResult TbSolveResult;

/**
 * Sizes of one side's TB-DAG.
 */
typedef struct TbDagStats {
  size_t decision_points;
  size_t observation_points;
  size_t edges;
  size_t max_belief;
  size_t max_fanout;
  size_t k;
} TbDagStats;

/**
 * Solver settings; obtain defaults from [`tb_solve_config_default`].
 */
typedef struct TbSolveConfig {
  enum TbAlgorithm algorithm;
  double eps;
  uint64_t max_iters;
  uint64_t log_every;
  /**
   * Nonzero for alternating updates.
   */
  uint8_t alternating;
  enum TbSplit split;
  /**
   * Nonzero to apply the DAG reductions.
   */
  uint8_t reduce;
  size_t edge_budget;
} TbSolveConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tb_version(void);

/**
 * Copy of the calling thread's last error message, or NULL if none.
 * Free with [`tb_string_free`].
 */
char *tb_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tb_string_free(char *s);

/**
 * Parses a game from its JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TbStatus tb_game_from_json(const char *json, struct TbGame **out);

/**
 * Generates a preset game such as "fig2", "3K3[1,3]" or "wc-k1-b2-d5".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum TbStatus tb_game_from_preset(const char *name, struct TbGame **out);

/**
 * # Safety
 * `game` must come from a `tb_game_*` constructor, or be NULL.
 */
void tb_game_free(struct TbGame *game);

/**
 * Node count, or 0 for NULL.
 *
 * # Safety
 * `game` must be a live handle or NULL.
 */
size_t tb_game_num_nodes(const struct TbGame *game);

/**
 * Terminal count, or 0 for NULL. Realization buffers use this length.
 *
 * # Safety
 * `game` must be a live handle or NULL.
 */
size_t tb_game_num_terminals(const struct TbGame *game);

/**
 * Serializes the game to JSON. Free the string with [`tb_string_free`].
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_game_to_json(const struct TbGame *game, char **out);

/**
 * Builds one side's TB-DAG and reports its sizes.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_build_stats(const struct TbGame *game,
                             enum TbSide side,
                             enum TbSplit split,
                             uint8_t reduce,
                             size_t edge_budget,
                             struct TbDagStats *out);

/**
 * Default solver settings (PCFR+, eps 1e-3, observation split, reduced).
 */
struct TbSolveConfig tb_solve_config_default(void);

/**
 * Builds both TB-DAGs and runs self-play. `config` may be NULL for the
 * defaults.
 *
 * # Safety
 * `game` must be a live handle, `config` valid or NULL, `out` writable.
 */
enum TbStatus tb_solve(const struct TbGame *game,
                       const struct TbSolveConfig *config,
                       struct TbSolveResult **out);

/**
 * # Safety
 * `result` must come from [`tb_solve`], or be NULL.
 */
void tb_result_free(struct TbSolveResult *result);

/**
 * MAX's expected utility under the average strategies (NaN for NULL).
 *
 * # Safety
 * `result` must be a live handle or NULL.
 */
double tb_result_value(const struct TbSolveResult *result);

/**
 * Certified saddle gap of the average strategies (NaN for NULL).
 *
 * # Safety
 * `result` must be a live handle or NULL.
 */
double tb_result_gap(const struct TbSolveResult *result);

/**
 * # Safety
 * `result` must be a live handle or NULL.
 */
uint64_t tb_result_iterations(const struct TbSolveResult *result);

/**
 * 1 if the gap target was reached.
 *
 * # Safety
 * `result` must be a live handle or NULL.
 */
uint8_t tb_result_converged(const struct TbSolveResult *result);

/**
 * Copies one side's average realization per terminal into `buf`, which
 * must hold `tb_game_num_terminals` entries.
 *
 * # Safety
 * `result` must be a live handle; `buf` must hold `len` doubles.
 */
enum TbStatus tb_result_realization(const struct TbSolveResult *result,
                                    enum TbSide side,
                                    double *buf,
                                    size_t len);

/**
 * Summary and convergence log as JSON. Free with [`tb_string_free`].
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_result_to_json(const struct TbSolveResult *result, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TBDAG_H */
