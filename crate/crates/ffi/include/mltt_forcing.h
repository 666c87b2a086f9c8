#ifndef MLTT_FORCING_H
#define MLTT_FORCING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum MfStatus {
  MF_STATUS_OK = 0,
  /**
   * The judgment or refutation was rejected; output is still written.
   */
  MF_STATUS_REJECT = 1,
  MF_STATUS_PARSE_ERROR = 2,
  MF_STATUS_NULL_POINTER = 3,
  MF_STATUS_INVALID_UTF8 = 4,
  MF_STATUS_FUEL_EXHAUSTED = 5,
  MF_STATUS_MODE_VIOLATION = 6,
  MF_STATUS_INTERNAL = 7,
} MfStatus;

/**
 * Opaque term handle.
 */
typedef struct MfTerm MfTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *mf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mf_version(void);

/**
 * Parse a closed term. On success `*out` owns a new handle.
 *
 * # Safety
 * `src` must be null or a NUL-terminated string; `out` must be null or
 * point to writable storage for one pointer.
 */
enum MfStatus mf_term_parse(const char *src, struct MfTerm **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `t` must be null or a handle from this library not yet freed.
 */
void mf_term_free(struct MfTerm *t);

/**
 * Print a term in surface syntax. Returns null if `t` is null.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
char *mf_term_to_string(const struct MfTerm *t);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void mf_string_free(char *s);

/**
 * Reduce `t` to weak head normal form at condition `cond` (e.g. `{0=1}`)
 * in `mode` (`plain`, `forcing` or `many-reals`). Null `cond` means `{}`,
 * null `mode` means `many-reals`, and `fuel` 0 means the default budget.
 * `*stuck_index` receives the index a properly stuck result waits on,
 * or -1; it may be null.
 *
 * # Safety
 * Pointer arguments must be null or valid as described above.
 */
enum MfStatus mf_whnf(const struct MfTerm *t,
                      const char *cond,
                      const char *mode,
                      uint64_t fuel,
                      struct MfTerm **out,
                      int64_t *stuck_index);

/**
 * Check a checking file given as text. `*json_out` receives the JSON
 * report (also on `MF_STATUS_REJECT`). Returns `MF_STATUS_OK` when every
 * item is accepted.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `json_out` writable.
 */
enum MfStatus mf_check_source(const char *src, char **json_out);

/**
 * Try to show that `t` is no closed witness of `Sig (x : N) IsZero (f x)`,
 * or of the same type over `f[q]` when `q` is non-null. On success
 * `*json_out` receives the refutation certificate.
 *
 * # Safety
 * `t` must be a live handle, `q` null or a NUL-terminated string, and
 * `json_out` writable.
 */
enum MfStatus mf_refute_sigma(const struct MfTerm *t, const char *q, char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLTT_FORCING_H */
