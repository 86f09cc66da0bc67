#ifndef EINFTY_H
#define EINFTY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EinftyRing {
  EINFTY_RING_INTEGERS = 0,
  EINFTY_RING_MOD2 = 1,
} EinftyRing;

typedef enum EinftyScope {
  // The three defining relations.
  EINFTY_SCOPE_S = 0,
  // The relations together with the surjection rules, over F2.
  EINFTY_SCOPE_MS = 1,
} EinftyScope;

// Result codes. The first four match the command line exit codes.
typedef enum EinftyStatus {
  EINFTY_STATUS_OK = 0,
  EINFTY_STATUS_VERIFICATION_FAILED = 1,
  EINFTY_STATUS_PARSE_ERROR = 2,
  EINFTY_STATUS_SEMANTIC_ERROR = 3,
  EINFTY_STATUS_NULL_ARGUMENT = 4,
  EINFTY_STATUS_INVALID_UTF8 = 5,
  EINFTY_STATUS_PANIC = 6,
} EinftyStatus;

// Opaque linear combination of graph terms.
typedef struct EinftyElement EinftyElement;

// Opaque finite simplicial set.
typedef struct EinftySset EinftySset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Owned by the
// library; valid until the next failing call.
const char *einfty_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void einfty_string_free(char *s);

// Parses a term or combination JSON. Bare graphs get coefficient one in
// `ring`; combinations carry their own ring.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum EinftyStatus einfty_element_from_json(const char *json,
                                           enum EinftyRing ring,
                                           struct EinftyElement **out);

// # Safety
// `x` must be null or a handle from this library, not yet freed.
void einfty_element_free(struct EinftyElement *x);

// # Safety
// `x` must be a live handle and `out` a valid pointer.
enum EinftyStatus einfty_element_to_json(const struct EinftyElement *x, char **out);

// Writes 1 to `out` if the element is zero, else 0.
//
// # Safety
// `x` must be a live handle and `out` a valid pointer.
enum EinftyStatus einfty_element_is_zero(const struct EinftyElement *x, int32_t *out);

// Normal form modulo the relations of `scope`.
//
// # Safety
// `x` must be a live handle and `out` a valid pointer.
enum EinftyStatus einfty_element_reduce(const struct EinftyElement *x,
                                        enum EinftyScope scope,
                                        struct EinftyElement **out);

// `top ∘ bottom`, with `bottom` applied first.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum EinftyStatus einfty_element_compose(const struct EinftyElement *top,
                                         const struct EinftyElement *bottom,
                                         struct EinftyElement **out);

// # Safety
// Both handles must be live and `out` a valid pointer.
enum EinftyStatus einfty_element_tensor(const struct EinftyElement *a,
                                        const struct EinftyElement *b,
                                        struct EinftyElement **out);

// # Safety
// `x` must be a live handle and `out` a valid pointer.
enum EinftyStatus einfty_element_differential(const struct EinftyElement *x,
                                              struct EinftyElement **out);

// Parses a `{"complex": ..}` or `{"sset": ..}` document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum EinftyStatus einfty_sset_from_json(const char *json, struct EinftySset **out);

// The standard `d`-simplex.
//
// # Safety
// `out` must be a valid pointer.
enum EinftyStatus einfty_sset_standard(uint32_t d, struct EinftySset **out);

// # Safety
// `x` must be null or a handle from this library, not yet freed.
void einfty_sset_free(struct EinftySset *x);

// Applies a `(1, m)` element to a chain given as a simplex name such as
// `"[0,1,2]"` or as chain JSON. The result is tensor chain JSON.
//
// # Safety
// Handles must be live, `chain` NUL-terminated and `out` a valid pointer.
enum EinftyStatus einfty_coact(const struct EinftyElement *x,
                               const struct EinftySset *space,
                               const char *chain,
                               char **out);

// Tables of `Sq^k` on mod 2 cohomology, as JSON.
//
// # Safety
// `space` must be a live handle and `out` a valid pointer.
enum EinftyStatus einfty_steenrod(const struct EinftySset *space, uint32_t k, char **out);

// Runs one verification suite with its default bounds. The report JSON is
// written even when the suite fails, in which case the status is
// `VerificationFailed`.
//
// # Safety
// `suite` must be NUL-terminated and `out` a valid pointer.
enum EinftyStatus einfty_verify(const char *suite, uint64_t seed, char **out);

// Library version, static.
const char *einfty_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EINFTY_H */
