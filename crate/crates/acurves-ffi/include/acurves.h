#ifndef ACURVES_H
#define ACURVES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_NULL_POINTER = 1,
  AC_STATUS_UTF8 = 2,
  AC_STATUS_DOCUMENT = 3,
  AC_STATUS_INVALID_CURVE = 4,
  AC_STATUS_NOT_STABLE = 5,
  AC_STATUS_MISSING_ROLE = 6,
  AC_STATUS_INVALID_ARGUMENT = 7,
  AC_STATUS_RESOURCE_BOUND = 8,
  AC_STATUS_OTHER = 9,
} AcStatus;

typedef enum AcClosed {
  AC_CLOSED_CLOSED = 0,
  AC_CLOSED_NOT_CLOSED = 1,
  AC_CLOSED_SPECIAL_UNPROVEN = 2,
} AcClosed;

// Opaque curve handle.
typedef struct AcCurve AcCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a curve document and returns a new handle in `out`.
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum AcStatus ac_curve_from_json(const char *json, struct AcCurve **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `handle` must be null or come from `ac_curve_from_json` and not be used again.
void ac_curve_free(struct AcCurve *handle);

// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_genus(const struct AcCurve *handle, uint32_t *out);

// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_is_stable(const struct AcCurve *handle, uint32_t r, bool *out);

// Torus rank and unipotent part of the identity component of the
// automorphism group.
//
// # Safety
// `handle` must be a live handle; `torus_rank` and `unipotent` writable.
enum AcStatus ac_curve_aut(const struct AcCurve *handle,
                           uint32_t r,
                           uint32_t *torus_rank,
                           bool *unipotent);

// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_is_special(const struct AcCurve *handle, uint32_t r, bool *out);

// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_closed_status(const struct AcCurve *handle, uint32_t r, enum AcClosed *out);

// Number of one-step isotrivial specializations.
//
// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_move_count(const struct AcCurve *handle, uint32_t r, size_t *out);

// Canonically relabelled curve as JSON, to be released with `ac_string_free`.
//
// # Safety
// `handle` must be a live handle and `out` writable.
enum AcStatus ac_curve_canonical_json(const struct AcCurve *handle, char **out);

// Whether two curves are isomorphic as decorated curves.
//
// # Safety
// Both handles must be live and `out` writable.
enum AcStatus ac_curve_isomorphic(const struct AcCurve *a, const struct AcCurve *b, bool *out);

// Number of stable types of genus `g` with `n` markings, singularities up
// to `A_r` and at most `max_components` components.
//
// # Safety
// `out` must be writable.
enum AcStatus ac_enumerate_count(uint32_t g,
                                 uint32_t n,
                                 uint32_t r,
                                 uint32_t max_components,
                                 size_t *out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or come from this library and not be used again.
void ac_string_free(char *s);

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *ac_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACURVES_H */
