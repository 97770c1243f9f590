#ifndef ULTRACHAIN_H
#define ULTRACHAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UcStatus {
  UC_STATUS_OK = 0,
  UC_STATUS_NULL_POINTER = 1,
  UC_STATUS_INVALID_UTF8 = 2,
  UC_STATUS_MALFORMED = 3,
  UC_STATUS_OUT_OF_WINDOW = 4,
  UC_STATUS_DOMAIN = 5,
  UC_STATUS_CONTRACT_VIOLATION = 6,
  UC_STATUS_PRECONDITION = 7,
  UC_STATUS_IO = 8,
  UC_STATUS_JSON = 9,
  UC_STATUS_OUT_OF_RANGE = 10,
  UC_STATUS_PANIC = 11,
} UcStatus;

typedef enum UcFlavor {
  UC_FLAVOR_D = 0,
  UC_FLAVOR_D_PLUS = 1,
  UC_FLAVOR_D_MINUS = 2,
} UcFlavor;

/**
 * Chain of partitions built from a space.
 */
typedef struct UcChain UcChain;

/**
 * Finite ultrametric space.
 */
typedef struct UcSpace UcSpace;

/**
 * Validated tower.
 */
typedef struct UcTower UcTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *uc_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void uc_string_free(char *s);

/**
 * Checks the strong triangle inequality on a `{"points":..,"dist":..}`
 * document. `out_valid` receives the verdict; on a violation `out_triple`
 * (three entries, may be null) receives `(x, y, z)` with `d(x,y)` offending.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_valid` must be writable;
 * `out_triple` must be null or point to three writable `size_t`.
 */
enum UcStatus uc_check_ultrametric(const char *json, bool *out_valid, size_t *out_triple);

/**
 * Parses a `{"points":..,"dist":..}` document into a space handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum UcStatus uc_space_from_json(const char *json, struct UcSpace **out);

/**
 * # Safety
 * `s` must be null or a handle from [`uc_space_from_json`], not yet freed.
 */
void uc_space_free(struct UcSpace *s);

/**
 * # Safety
 * `s` must be a live space handle and `out` writable.
 */
enum UcStatus uc_space_len(const struct UcSpace *s, size_t *out);

/**
 * Exact distance between points `i` and `j`, as a fraction string
 * such as `"3/4"`.
 *
 * # Safety
 * `s` must be a live space handle and `out` writable.
 */
enum UcStatus uc_space_distance(const struct UcSpace *s, size_t i, size_t j, char **out);

/**
 * # Safety
 * `s` must be a live space handle and `out` writable.
 */
enum UcStatus uc_chain_from_space(const struct UcSpace *s,
                                  enum UcFlavor flavor,
                                  struct UcChain **out);

/**
 * # Safety
 * `c` must be null or a handle from [`uc_chain_from_space`], not yet freed.
 */
void uc_chain_free(struct UcChain *c);

/**
 * Window `[lo, hi]` of stored levels.
 *
 * # Safety
 * `c` must be a live chain handle; `lo` and `hi` writable.
 */
enum UcStatus uc_chain_window(const struct UcChain *c, int64_t *lo, int64_t *hi);

/**
 * Number of elements at level `k`.
 *
 * # Safety
 * `c` must be a live chain handle and `out` writable.
 */
enum UcStatus uc_chain_level_len(const struct UcChain *c, int64_t k, size_t *out);

/**
 * # Safety
 * `c` must be a live chain handle and `out` writable.
 */
enum UcStatus uc_chain_dot(const struct UcChain *c, char **out);

/**
 * Evaluates the four tower conditions on a `{"nodes":[..]}` document without
 * requiring them to hold. Bit `n - 1` of `out_mask` is set when condition
 * `n` passes.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_mask` writable.
 */
enum UcStatus uc_tower_validate(const char *json, uint32_t *out_mask);

/**
 * Parses a tower; fails with `Malformed` unless all four conditions hold.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum UcStatus uc_tower_from_json(const char *json, struct UcTower **out);

/**
 * # Safety
 * `t` must be null or a handle from [`uc_tower_from_json`], not yet freed.
 */
void uc_tower_free(struct UcTower *t);

/**
 * Index of the node with the given id.
 *
 * # Safety
 * `t` must be a live tower handle, `id` a NUL-terminated string, `out` writable.
 */
enum UcStatus uc_tower_index_of(const struct UcTower *t, const char *id, size_t *out);

/**
 * Path metric between nodes `x` and `y`.
 *
 * # Safety
 * `t` must be a live tower handle and `out` writable.
 */
enum UcStatus uc_tower_metric(const struct UcTower *t, size_t x, size_t y, uint32_t *out);

/**
 * # Safety
 * `t` must be a live tower handle and `out` writable.
 */
enum UcStatus uc_tower_dot(const struct UcTower *t, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ULTRACHAIN_H */
