#ifndef NESTSIM_H
#define NESTSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_NULL_POINTER = 1,
  NS_STATUS_INVALID_UTF8 = 2,
  NS_STATUS_PARSE = 3,
  NS_STATUS_INVALID_KIND = 4,
  NS_STATUS_OUT_OF_RANGE = 5,
  NS_STATUS_INVALID_ARGUMENT = 6,
  NS_STATUS_INTERNAL = 7,
} NsStatus;

/**
 * A labelled transition system.
 */
typedef struct NsLts NsLts;

/**
 * A binary relation over the states of one system.
 */
typedef struct NsRelation NsRelation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ns_last_error_message(void);

/**
 * Parses Aldebaran text into a new system stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NsStatus ns_lts_parse_aut(const char *text, struct NsLts **out);

/**
 * Builds a seeded random system over a comma-separated action list.
 *
 * # Safety
 * `actions` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NsStatus ns_lts_generate(size_t states,
                              const char *actions,
                              double density,
                              uint64_t seed,
                              struct NsLts **out);

/**
 * Releases a system. Null is ignored.
 *
 * # Safety
 * `lts` must come from this library and not be used afterwards.
 */
void ns_lts_free(struct NsLts *lts);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `lts` must be null or a live handle.
 */
size_t ns_lts_num_states(const struct NsLts *lts);

/**
 * Computes a preorder (`sim`, `opsim`, `bisim`, `simeq`, `nsim:<n>`,
 * `nopsim:<n>`) as a relational greatest fixed point.
 *
 * # Safety
 * `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum NsStatus ns_relation_compute(const struct NsLts *lts,
                                  const char *kind,
                                  struct NsRelation **out);

/**
 * Computes a preorder by solving its characteristic declarations.
 *
 * # Safety
 * Same as [`ns_relation_compute`].
 */
enum NsStatus ns_relation_characterized(const struct NsLts *lts,
                                        const char *kind,
                                        struct NsRelation **out);

/**
 * Stores in `*out` whether `(p, q)` is in the relation.
 *
 * # Safety
 * `rel` must be a live handle and `out` a valid pointer.
 */
enum NsStatus ns_relation_contains(const struct NsRelation *rel, size_t p, size_t q, bool *out);

/**
 * Number of pairs, or 0 for a null handle.
 *
 * # Safety
 * `rel` must be null or a live handle.
 */
size_t ns_relation_size(const struct NsRelation *rel);

/**
 * Whether two relations hold exactly the same pairs. False if either is null.
 *
 * # Safety
 * Both arguments must be null or live handles.
 */
bool ns_relation_equal(const struct NsRelation *a, const struct NsRelation *b);

/**
 * Releases a relation. Null is ignored.
 *
 * # Safety
 * `rel` must come from this library and not be used afterwards.
 */
void ns_relation_free(struct NsRelation *rel);

/**
 * Decides `p <= q` for the given preorder.
 *
 * # Safety
 * `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum NsStatus ns_check(const struct NsLts *lts, const char *kind, size_t p, size_t q, bool *out);

/**
 * Renders the characteristic declarations of a preorder with one `target:`
 * line per state. Release the result with [`ns_string_free`].
 *
 * # Safety
 * `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum NsStatus ns_char_system_render(const struct NsLts *lts, const char *kind, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ns_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NESTSIM_H */
