#ifndef MACHINE_SPACE_H
#define MACHINE_SPACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsSearchStatus {
  MS_SEARCH_STATUS_FOUND = 0,
  MS_SEARCH_STATUS_NO_WITNESS = 1,
  MS_SEARCH_STATUS_UNDECIDED = 2,
} MsSearchStatus;

typedef enum MsSpace {
  MS_SPACE_CANTOR_DIGITS = 0,
  MS_SPACE_CANTOR_PREFIX = 1,
  MS_SPACE_INTERVAL = 2,
} MsSpace;

/**
 * Result codes. The nonzero codes below 5 match the command-line exit codes.
 */
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_MISMATCH = 2,
  MS_STATUS_SYNTAX = 3,
  MS_STATUS_LIMIT = 4,
  MS_STATUS_NULL_ARGUMENT = 5,
  MS_STATUS_INVALID_UTF8 = 6,
  MS_STATUS_INVALID_ARGUMENT = 7,
  MS_STATUS_INTERNAL = 8,
} MsStatus;

/**
 * A parsed machine.
 */
typedef struct MsMachine MsMachine;

/**
 * Settings for the quantifiers.
 */
typedef struct MsRunOptions {
  uint64_t fuel;
  uint64_t max_generator_index;
  size_t max_family_size;
  /**
   * Selects the basic schedule instead of the exhaustive one.
   */
  bool basic_schedule;
} MsRunOptions;

/**
 * Result of a quantifier run. `halted` is false when the fuel ran out,
 * which is not a negative answer.
 */
typedef struct MsRunResult {
  bool halted;
  uint64_t fuel_used;
  /**
   * The enumeration ran out within the caps, so no later halt is possible.
   */
  bool exhausted;
} MsRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or "" if none.
 * Valid until the next call into the library on this thread.
 */
const char *ms_last_error(void);

struct MsRunOptions ms_default_options(void);

/**
 * Parses a nul-terminated expression into `*out`.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum MsStatus ms_parse(const char *text, struct MsMachine **out);

/**
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void ms_machine_free(struct MsMachine *m);

/**
 * Writes the expression syntax of `m` to `*out`; free it with [`ms_string_free`].
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_machine_to_string(const struct MsMachine *m, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ms_string_free(char *s);

/**
 * Number of branches of `m`, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t ms_machine_branch_count(const struct MsMachine *m);

/**
 * Writes the normal form of `m` to `*out` as a new handle.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_normalize(const struct MsMachine *m, struct MsMachine **out);

/**
 * Decides whether `m` covers the space.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_covers(enum MsSpace space, const struct MsMachine *m, bool *out);

/**
 * Runs the universal quantifier on `m`. `opts` may be null for defaults.
 *
 * # Safety
 * `m` must be a live handle, `opts` null or valid, `out` valid.
 */
enum MsStatus ms_forall(enum MsSpace space,
                        const struct MsMachine *m,
                        const struct MsRunOptions *opts,
                        struct MsRunResult *out);

/**
 * Runs the existential quantifier on `m`. `opts` may be null for defaults.
 *
 * # Safety
 * `m` must be a live handle, `opts` null or valid, `out` valid.
 */
enum MsStatus ms_exists(enum MsSpace space,
                        const struct MsMachine *m,
                        const struct MsRunOptions *opts,
                        struct MsRunResult *out);

/**
 * Searches the words of length `depth`, each followed by zeros, for one
 * that `m` accepts. A negative `depth` means the deepest digit `m` reads.
 * On `MS_SEARCH_STATUS_FOUND` the word is written to `*word` as a string of
 * '0' and '1'; otherwise `*word` is set to null.
 *
 * # Safety
 * `m` must be a live handle; `status` and `word` valid pointers.
 */
enum MsStatus ms_search(enum MsSpace space,
                        const struct MsMachine *m,
                        int64_t depth,
                        uint64_t fuel,
                        enum MsSearchStatus *status,
                        char **word);

/**
 * Space of the generators of `m`: 0, 1 or 2 as in [`MsSpace`], or -1 when
 * `m` has no generators or is null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
int32_t ms_machine_space(const struct MsMachine *m);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MACHINE_SPACE_H */
