#ifndef EXTREMAL_H
#define EXTREMAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ExtremalStatus {
  EXTREMAL_STATUS_OK = 0,
  EXTREMAL_STATUS_NULL_POINTER = 1,
  EXTREMAL_STATUS_INVALID_ARGUMENT = 2,
  EXTREMAL_STATUS_UNSUPPORTED = 3,
  EXTREMAL_STATUS_DEGENERATE = 4,
  EXTREMAL_STATUS_INTERNAL = 5,
  EXTREMAL_STATUS_PANIC = 6,
} ExtremalStatus;

/**
 * An operator expression bound to a module.
 */
typedef struct ExtremalOperator ExtremalOperator;

/**
 * A truncated universal Verma module.
 */
typedef struct ExtremalVerma ExtremalVerma;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or null if the last call
 * succeeded. Release with [`extremal_string_free`].
 */
char *extremal_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void extremal_string_free(char *s);

/**
 * # Safety
 * `out` must be valid for a write.
 */
enum ExtremalStatus extremal_verma_new(uintptr_t n, uintptr_t depth, struct ExtremalVerma **out);

/**
 * # Safety
 * `v` must be null or a handle from [`extremal_verma_new`], freed once.
 */
void extremal_verma_free(struct ExtremalVerma *v);

/**
 * # Safety
 * `v` must be a live handle and `out` valid for a write.
 */
enum ExtremalStatus extremal_verma_num_blocks(const struct ExtremalVerma *v, uintptr_t *out);

/**
 * The relative extremal projector `P(g, l)` for a standard `l` such as
 * `"h"`, `"23"` or `"12,45"`.
 *
 * # Safety
 * `v` must be a live handle, `l` a nul-terminated string, `out` valid.
 */
enum ExtremalStatus extremal_projector_new(const struct ExtremalVerma *v,
                                           const char *l,
                                           struct ExtremalOperator **out);

/**
 * A factor by name: `P123^12`, `P34`, `Q35`, `Q124^12`, ...
 *
 * # Safety
 * As for [`extremal_projector_new`].
 */
enum ExtremalStatus extremal_factor_new(const struct ExtremalVerma *v,
                                        const char *name,
                                        struct ExtremalOperator **out);

/**
 * The product `a b`; `b` acts first.
 *
 * # Safety
 * `a`, `b` live handles on the same module, `out` valid.
 */
enum ExtremalStatus extremal_operator_compose(const struct ExtremalOperator *a,
                                              const struct ExtremalOperator *b,
                                              struct ExtremalOperator **out);

/**
 * # Safety
 * `op` must be null or a handle from this library, freed once.
 */
void extremal_operator_free(struct ExtremalOperator *op);

/**
 * Symbolic block matrices as JSON.
 *
 * # Safety
 * `op` a live handle, `out` valid for a write.
 */
enum ExtremalStatus extremal_operator_to_json(const struct ExtremalOperator *op, char **out);

/**
 * Compares two operators, exactly or at `trials` seeded random points.
 *
 * # Safety
 * `a`, `b` live handles, `equal` valid for a write.
 */
enum ExtremalStatus extremal_operator_equal(const struct ExtremalOperator *a,
                                            const struct ExtremalOperator *b,
                                            bool symbolic,
                                            uint64_t seed,
                                            uintptr_t trials,
                                            bool *equal);

/**
 * Runs a named identity. `depth` 0 keeps the registered depth; `json`
 * may be null.
 *
 * # Safety
 * `id` a nul-terminated string, `passed` valid, `json` null or valid.
 */
enum ExtremalStatus extremal_registry_verify(const char *id,
                                             uintptr_t depth,
                                             bool *passed,
                                             char **json);

/**
 * Solves the factorization problem of a named identity and returns the
 * result as JSON.
 *
 * # Safety
 * `id` a nul-terminated string, `json` valid for a write.
 */
enum ExtremalStatus extremal_registry_solve(const char *id, uintptr_t depth, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXTREMAL_H */
