#ifndef GHK_H
#define GHK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define GHK_OK 0

#define GHK_ERR_NULL 1

#define GHK_ERR_UTF8 2

#define GHK_ERR_INVALID_ARGUMENT 3

#define GHK_ERR_PARSE 4

#define GHK_ERR_COMPUTE 5

#define GHK_ERR_BUFFER_TOO_SMALL 6

#define GHK_ERR_OUT_OF_RANGE 7

#define GHK_ERR_PANIC 8

#define GHK_MODE_QUOTIENT 0

#define GHK_MODE_FULL 1

#define GHK_MODE_CUT_ONLY 2

/**
 * Ranks from this one on need `extended != 0`.
 */
#define GHK_EXTENDED_RANK 7

/**
 * Opaque homology table.
 */
typedef struct GhkHomology GhkHomology;

/**
 * One degree of a homology table.
 */
typedef struct GhkHomologyRow {
  uint64_t degree;
  uint64_t dim;
  uint64_t boundary_rank_out;
  uint64_t betti;
} GhkHomologyRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ghk_status_message(int32_t code);

/**
 * Computes the homology table of the given rank and mode.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle. On
 * success `*out` owns a table that must be released with
 * `ghk_homology_free`; on failure `*out` is set to null.
 */
int32_t ghk_homology_compute(uint32_t rank,
                             int32_t mode,
                             int32_t extended,
                             struct GhkHomology **out);

/**
 * Number of degrees (rows) in the table, top degree first.
 *
 * # Safety
 * `h` must be null or a live handle from `ghk_homology_compute`; `count`
 * must be null or valid for one write.
 */
int32_t ghk_homology_row_count(const struct GhkHomology *h, uintptr_t *count);

/**
 * Copies row `index` (0 = top degree) into `row`.
 *
 * # Safety
 * `h` must be null or a live handle; `row` must be null or valid for one
 * write.
 */
int32_t ghk_homology_row(const struct GhkHomology *h, uintptr_t index, struct GhkHomologyRow *row);

/**
 * Rank of the graphs the table describes.
 *
 * # Safety
 * `h` must be null or a live handle; `rank` must be null or valid for one
 * write.
 */
int32_t ghk_homology_rank(const struct GhkHomology *h, uint32_t *rank);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from `ghk_homology_compute` not yet freed.
 */
void ghk_homology_free(struct GhkHomology *h);

/**
 * Writes the canonical key of the single graph in `record` (graph text
 * format) as a NUL-terminated string. `*needed` receives the buffer size
 * required including the terminator, also when the buffer is too small.
 *
 * # Safety
 * `record` must be a NUL-terminated string; `buf` must be valid for `len`
 * bytes (it may be null when `len` is 0); `needed` must be null or valid
 * for one write.
 */
int32_t ghk_canonical_key(const char *record, char *buf, uintptr_t len, uintptr_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHK_H */
