#ifndef ABELRD_H
#define ABELRD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call. The non-zero values match the exit codes of the
 * command line tool where both exist.
 */
typedef enum AbelrdStatus {
  ABELRD_STATUS_OK = 0,
  /**
   * A simulation check disagreed with its prediction. Output is still written.
   */
  ABELRD_STATUS_VERIFICATION_FAILED = 1,
  ABELRD_STATUS_INVALID_ARGUMENT = 2,
  ABELRD_STATUS_RESOURCE_GUARD = 3,
  ABELRD_STATUS_NULL_POINTER = 4,
  /**
   * A bug inside the library; the message carries the panic text.
   */
  ABELRD_STATUS_INTERNAL = 5,
} AbelrdStatus;

/**
 * Which regions [`abelrd_region_json`] computes.
 */
typedef enum AbelrdRegionMode {
  ABELRD_REGION_MODE_THEOREM1 = 0,
  ABELRD_REGION_MODE_BERGER_TUNG = 1,
  ABELRD_REGION_MODE_BOTH = 2,
} AbelrdRegionMode;

/**
 * A finite abelian group.
 */
typedef struct AbelrdGroup AbelrdGroup;

/**
 * A joint probability mass function.
 */
typedef struct AbelrdPmf AbelrdPmf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *abelrd_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *abelrd_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void abelrd_string_free(char *s);

/**
 * Parses a group name such as `Z4+Z2`, `Z2^3` or `Z12`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` writable.
 */
enum AbelrdStatus abelrd_group_parse(const char *name, struct AbelrdGroup **out);

/**
 * `Z_n` in its primary decomposition.
 *
 * # Safety
 * `out` must be writable.
 */
enum AbelrdStatus abelrd_group_cyclic(uint64_t n, struct AbelrdGroup **out);

/**
 * # Safety
 * `g` must come from this library and not have been freed. Null is ignored.
 */
void abelrd_group_free(struct AbelrdGroup *g);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum AbelrdStatus abelrd_group_order(const struct AbelrdGroup *g, uint64_t *out);

/**
 * Number of primary cyclic factors.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum AbelrdStatus abelrd_group_rank(const struct AbelrdGroup *g, size_t *out);

/**
 * Canonical name of the group.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum AbelrdStatus abelrd_group_name(const struct AbelrdGroup *g, char **out);

/**
 * Sum of two elements given by their mixed-radix indices.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum AbelrdStatus abelrd_group_add(const struct AbelrdGroup *g, size_t a, size_t b, size_t *out);

/**
 * A pmf over a product of alphabets with sizes `shape[0..rank]`, given
 * row-major (last axis fastest). The masses must sum to one.
 *
 * # Safety
 * `values` must hold `len` doubles, `shape` `rank` sizes, and `out` be writable.
 */
enum AbelrdStatus abelrd_pmf_new(const double *values,
                                 size_t len,
                                 const size_t *shape,
                                 size_t rank,
                                 struct AbelrdPmf **out);

/**
 * # Safety
 * `p` must come from this library and not have been freed. Null is ignored.
 */
void abelrd_pmf_free(struct AbelrdPmf *p);

/**
 * Attaches a group to an axis whose size equals the group order. Symbol `i`
 * of the axis becomes the element with mixed-radix index `i`.
 *
 * # Safety
 * `p` and `g` must be live handles.
 */
enum AbelrdStatus abelrd_pmf_attach_group(struct AbelrdPmf *p,
                                          size_t axis,
                                          const struct AbelrdGroup *g);

/**
 * Joint entropy in bits of the listed axes.
 *
 * # Safety
 * `p` must be a live handle, `axes` hold `n_axes` indices and `out` be writable.
 */
enum AbelrdStatus abelrd_pmf_entropy(const struct AbelrdPmf *p,
                                     const size_t *axes,
                                     size_t n_axes,
                                     double *out);

/**
 * `H(target | given)` in bits.
 *
 * # Safety
 * `p` must be a live handle, the index arrays hold their stated lengths and
 * `out` be writable.
 */
enum AbelrdStatus abelrd_pmf_conditional_entropy(const struct AbelrdPmf *p,
                                                 const size_t *target,
                                                 size_t n_target,
                                                 const size_t *given,
                                                 size_t n_given,
                                                 double *out);

/**
 * Rate of a good channel code over `Z_{p^r}` for the axis `z` (which must
 * carry a primary cyclic group) with the `side` axes at the decoder.
 *
 * # Safety
 * `p` must be a live handle, `side` hold `n_side` indices and `out` be writable.
 */
enum AbelrdStatus abelrd_channel_code_rate(const struct AbelrdPmf *p,
                                           size_t z,
                                           const size_t *side,
                                           size_t n_side,
                                           double *out);

/**
 * Rate of a good source code over `Z_{p^r}` for the axis `u` given the `x` axes.
 *
 * # Safety
 * `p` must be a live handle, `x` hold `n_x` indices and `out` be writable.
 */
enum AbelrdStatus abelrd_source_code_rate(const struct AbelrdPmf *p,
                                          size_t u,
                                          const size_t *x,
                                          size_t n_x,
                                          double *out);

/**
 * Solves a problem specification (the JSON accepted by `abelrd region`)
 * and writes the result bundle as JSON.
 *
 * # Safety
 * `spec_json` must be a nul-terminated string and `out` writable.
 */
enum AbelrdStatus abelrd_region_json(const char *spec_json, enum AbelrdRegionMode mode, char **out);

/**
 * Runs a simulation check (`lemma4`, `lemma6`, `lemma7`, `lemma8`, `km`,
 * `cover` or `nested`) with a JSON simulation config and writes the report
 * as JSON. `pmf` may be null, in which case `km` and `cover` use a
 * symmetric source with crossover 0.05. Returns
 * [`AbelrdStatus::VerificationFailed`] when an exhaustive check deviates.
 *
 * # Safety
 * The strings must be nul-terminated, `pmf` null or a live handle, and
 * `out` writable.
 */
enum AbelrdStatus abelrd_simulate_json(const char *check,
                                       const char *config_json,
                                       const struct AbelrdPmf *pmf,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABELRD_H */
