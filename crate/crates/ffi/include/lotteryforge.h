#ifndef LOTTERYFORGE_H
#define LOTTERYFORGE_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_PARAMETER = 2,
  LF_STATUS_CAPACITY = 3,
  LF_STATUS_NON_UNIT = 4,
  LF_STATUS_PRECONDITION = 5,
  LF_STATUS_STRUCTURAL = 6,
  LF_STATUS_PARSE = 7,
  LF_STATUS_DEFECT = 8,
  LF_STATUS_IO = 9,
  LF_STATUS_BUFFER_TOO_SMALL = 10,
  LF_STATUS_UTF8 = 11,
  LF_STATUS_PANIC = 12,
} LfStatus;

/**
 * Opaque handle to a canonical set system.
 */
typedef struct LfSystem LfSystem;

typedef struct LfParams {
  uint32_t n;
  uint32_t k;
  uint32_t r;
  uint32_t p;
} LfParams;

/**
 * Verdict of a check. On failure the witness is written to the caller's
 * buffer and `witness_len` holds its size.
 */
typedef struct LfVerdict {
  bool ok;
  size_t witness_len;
} LfVerdict;

typedef struct LfCompositionReport {
  uint64_t size_a;
  uint64_t size_b;
  uint64_t overlap;
  uint64_t total;
  /**
   * Density `total / C(mN, r)` in lowest terms; `0/0` if either part
   * exceeds 64 bits.
   */
  uint64_t density_num;
  uint64_t density_den;
  bool verified;
} LfCompositionReport;

typedef struct LfBound {
  uint64_t lower;
  /**
   * `u64::MAX` when no upper bound is known.
   */
  uint64_t upper;
  bool complete;
  uint64_t nodes;
} LfBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lf_last_error(void);

/**
 * Builds a system from `block_count` blocks of `k` vertices each, stored
 * contiguously in `vertices`.
 *
 * # Safety
 * `vertices` must point to `block_count * k` readable `uint32_t` values
 * (it may be null when `block_count * k == 0`); `out` must be writable.
 */
enum LfStatus lf_system_new(uint32_t n,
                            uint32_t k,
                            const uint32_t *vertices,
                            size_t block_count,
                            struct LfSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle returned by this library and not yet freed.
 */
void lf_system_free(struct LfSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle.
 */
uint32_t lf_system_n(const struct LfSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle.
 */
uint32_t lf_system_k(const struct LfSystem *sys);

/**
 * Number of blocks.
 *
 * # Safety
 * `sys` must be a live handle.
 */
size_t lf_system_len(const struct LfSystem *sys);

/**
 * Copies block `index` (ascending vertices) into `out`, which holds
 * `capacity` values.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable for `capacity` values.
 */
enum LfStatus lf_system_block(const struct LfSystem *sys,
                              size_t index,
                              uint32_t *out,
                              size_t capacity);

/**
 * Parses the text system format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum LfStatus lf_system_parse(const char *text, struct LfSystem **out);

/**
 * Renders a system in the text format. Free the result with
 * [`lf_string_free`].
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum LfStatus lf_system_to_text(const struct LfSystem *sys, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void lf_string_free(char *s);

/**
 * Lottery check. A failing verdict writes the lexicographically least
 * failing `p`-set to `witness`.
 *
 * # Safety
 * `sys` must be a live handle, `witness` writable for `capacity` values
 * (or null with `capacity == 0`), and `out` writable.
 */
enum LfStatus lf_verify_lottery(const struct LfSystem *sys,
                                struct LfParams params,
                                uint32_t *witness,
                                size_t capacity,
                                struct LfVerdict *out);

/**
 * Covering check: every `r`-subset lies inside a block.
 *
 * # Safety
 * As [`lf_verify_lottery`].
 */
enum LfStatus lf_verify_covering(const struct LfSystem *sys,
                                 uint32_t r,
                                 uint32_t *witness,
                                 size_t capacity,
                                 struct LfVerdict *out);

/**
 * Transversal design with parts of size `part_size`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_gdd(uint32_t part_size, uint32_t k, uint32_t r, struct LfSystem **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_greedy_covering(uint32_t n, uint32_t k, uint32_t r, struct LfSystem **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_patches(uint32_t m,
                         uint32_t part_size,
                         uint32_t k,
                         uint32_t r,
                         struct LfSystem **out);

/**
 * Composes `base`, an `params`-lottery system, into one on
 * `params.n * part_size` vertices.
 *
 * # Safety
 * `base` must be a live handle; `out` and `report` writable (`report` may
 * be null).
 */
enum LfStatus lf_compose(const struct LfSystem *base,
                         struct LfParams params,
                         uint32_t part_size,
                         struct LfSystem **out,
                         struct LfCompositionReport *report);

/**
 * Exact `L(n, k, r, p)` within `max_nodes` search nodes (`0` for no
 * limit). The best certificate is returned through `certificate` when it
 * is non-null.
 *
 * # Safety
 * `out` must be writable; `certificate` null or writable.
 */
enum LfStatus lf_exact_min_lottery(struct LfParams params,
                                   uint64_t max_nodes,
                                   bool symmetry_break,
                                   struct LfBound *out,
                                   struct LfSystem **certificate);

/**
 * `M_{k,n}` as a decimal string. Free it with [`lf_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
enum LfStatus lf_m_lcm(uint32_t k, uint32_t n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOTTERYFORGE_H */
