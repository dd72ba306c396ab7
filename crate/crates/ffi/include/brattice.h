#ifndef BRATTICE_H
#define BRATTICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Zero is success.
typedef enum br_status {
  BR_STATUS_OK = 0,
  BR_STATUS_NULL_ARGUMENT = 1,
  BR_STATUS_INVALID_UTF8 = 2,
  BR_STATUS_PARSE = 3,
  BR_STATUS_SHAPE = 4,
  BR_STATUS_RANK_DEFICIENT = 5,
  BR_STATUS_DEPTH_EXCEEDED = 6,
  BR_STATUS_INDEX_OUT_OF_RANGE = 7,
  BR_STATUS_SINGULAR = 8,
  BR_STATUS_UNSUPPORTED = 9,
  BR_STATUS_PANIC = 10,
  // Validation found structural violations.
  BR_STATUS_INVALID = 11,
} br_status;

// Opaque completed-chain handle.
typedef struct br_chain br_chain;

// Opaque diagram handle.
typedef struct br_diagram br_diagram;

// Opaque minimal-reduction handle.
typedef struct br_tree br_tree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. Empty after a success.
// Valid until the next call on the same thread.
const char *br_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void br_string_free(char *s);

// Parses a diagram description.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum br_status br_diagram_parse(const char *spec, struct br_diagram **out);

// # Safety
// `d` must come from [`br_diagram_parse`] and not be freed twice.
void br_diagram_free(struct br_diagram *d);

// Checks the first `depth` levels. Violations are listed in
// [`br_last_error`], one per line.
//
// # Safety
// `d` must be a live handle.
enum br_status br_diagram_validate(const struct br_diagram *d, size_t depth);

// Builds a minimal reduction to `depth`. A null `strategy` picks the
// theorem construction, or the first lexicographic choice for irregular
// diagrams.
//
// # Safety
// `d` must be a live handle, `strategy` null or NUL-terminated, `out` valid.
enum br_status br_tree_build(const struct br_diagram *d,
                             const char *strategy,
                             size_t depth,
                             struct br_tree **out);

// # Safety
// `t` must come from [`br_tree_build`] and not be freed twice.
void br_tree_free(struct br_tree *t);

// Text dump of the parent maps and branch data.
//
// # Safety
// `t` must be a live handle and `out` valid.
enum br_status br_tree_dump(const struct br_tree *t, char **out);

// One-line end census.
//
// # Safety
// `t` must be a live handle and `out` valid.
enum br_status br_tree_census(const struct br_tree *t, char **out);

// Completes the multiplicity matrices to `depth`.
//
// # Safety
// `d` must be a live handle and `out` valid.
enum br_status br_chain_build(const struct br_diagram *d, size_t depth, struct br_chain **out);

// # Safety
// `c` must come from [`br_chain_build`] and not be freed twice.
void br_chain_free(struct br_chain *c);

// Text dump of squares and determinants, optionally with cumulative matrices.
//
// # Safety
// `c` must be a live handle and `out` valid.
enum br_status br_chain_dump(const struct br_chain *c, bool cumulative, char **out);

// Decides whether `func` (for example `depth=1: 0 1/2`) lies in the
// dimension group. On success `*is_member` is set. For members, `*witness`
// receives the witness line; otherwise it is set to null.
//
// # Safety
// Handles must be live, `func` NUL-terminated, out pointers valid.
enum br_status br_member(const struct br_chain *c,
                         const struct br_tree *t,
                         const char *func,
                         bool *is_member,
                         char **witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRATTICE_H */
