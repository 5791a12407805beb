#ifndef THETADEF_H
#define THETADEF_H

/* Auto-generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TdfStatus {
  /**
   * Success.
   */
  TdfStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  TdfStatus_NullPointer = 1,
  /**
   * Arguments failed validation (dimensions, cutoffs, tolerances).
   */
  TdfStatus_InvalidArgument = 2,
  /**
   * Input text could not be parsed.
   */
  TdfStatus_ParseFailed = 3,
  /**
   * The computation itself reported an error.
   */
  TdfStatus_ComputationFailed = 4,
} TdfStatus;

/**
 * Opaque handle to a weight-expansion element.
 */
typedef struct TdfElement TdfElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty (zero) element. Never fails.
 */
struct TdfElement *tdf_element_new(void);

/**
 * Creates the multiplicative unit.
 */
struct TdfElement *tdf_element_one(void);

/**
 * Creates the first generator (weight (1, 0)).
 */
struct TdfElement *tdf_element_u(void);

/**
 * Creates the second generator (weight (0, 1)).
 */
struct TdfElement *tdf_element_v(void);

/**
 * Deep-copies an element into a fresh handle.
 *
 * # Safety
 * `elem` must be a live pointer from this library.
 */
struct TdfElement *tdf_element_clone(const struct TdfElement *elem);

/**
 * Adds `re + i*im` at weight `(m, n)`.
 *
 * # Safety
 * `elem` must be a live pointer from `tdf_element_new` (or null, which is
 * reported as an error).
 */
enum TdfStatus tdf_element_add_term(struct TdfElement *elem,
                                    int32_t m,
                                    int32_t n,
                                    double re,
                                    double im);

/**
 * Reads the coefficient at weight `(m, n)` (zero when absent).
 *
 * # Safety
 * `elem` must be live; `re`, `im` must be valid output locations.
 */
enum TdfStatus tdf_element_coeff(const struct TdfElement *elem,
                                 int32_t m,
                                 int32_t n,
                                 double *re,
                                 double *im);

/**
 * Number of stored terms.
 *
 * # Safety
 * `elem` must be live; `count` must be a valid output location.
 */
enum TdfStatus tdf_element_term_count(const struct TdfElement *elem, uintptr_t *count);

/**
 * Largest coefficient magnitude.
 *
 * # Safety
 * `elem` must be live; `out` must be a valid output location.
 */
enum TdfStatus tdf_element_norm_inf(const struct TdfElement *elem, double *out);

/**
 * Sum `a + b` into a fresh handle.
 *
 * # Safety
 * `a`, `b` must be live element pointers and `out` a valid location for the
 * result pointer.
 */
enum TdfStatus tdf_element_add(const struct TdfElement *a,
                               const struct TdfElement *b,
                               struct TdfElement **out);

/**
 * Adjoint (conjugate at the opposite weight) into a fresh handle.
 *
 * # Safety
 * `elem` must be live and `out` a valid location for the result pointer.
 */
enum TdfStatus tdf_element_star(const struct TdfElement *elem, struct TdfElement **out);

/**
 * Computes the deformed product `a ∗_θ b` into a fresh handle.
 *
 * # Safety
 * `a`, `b` must be live element pointers and `out` a valid location for the
 * result pointer.
 */
enum TdfStatus tdf_deformed_product(const struct TdfElement *a,
                                    const struct TdfElement *b,
                                    double theta,
                                    struct TdfElement **out);

/**
 * Canonical trace (the weight-(0,0) coefficient).
 *
 * # Safety
 * `elem` must be live; `re`, `im` must be valid output locations.
 */
enum TdfStatus tdf_trace(const struct TdfElement *elem, double *re, double *im);

/**
 * Builds the bump projection of trace `theta` at the given Fourier cutoff.
 *
 * # Safety
 * `out` must be a valid location for the result pointer.
 */
enum TdfStatus tdf_powers_rieffel(double theta, uint32_t fourier_cutoff, struct TdfElement **out);

/**
 * Pairs the canonical trace with a projection at `theta`; writes the
 * normalized value and its distance to the nearest integer.
 *
 * # Safety
 * `p` must be live; the three output pointers must be valid locations.
 */
enum TdfStatus tdf_trace_pairing(const struct TdfElement *p,
                                 double theta,
                                 double *value_re,
                                 double *value_im,
                                 double *integer_distance);

/**
 * Parses an element from its JSON file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid result location.
 */
enum TdfStatus tdf_element_from_json(const char *json, struct TdfElement **out);

/**
 * Renders an element to its JSON file format. The returned string must be
 * released with [`tdf_string_free`].
 *
 * # Safety
 * `elem` must be live; `out` a valid location for the string pointer.
 */
enum TdfStatus tdf_element_to_json(const struct TdfElement *elem, char **out);

/**
 * Frees a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a string pointer previously returned by this library
 * and not yet freed.
 */
void tdf_string_free(char *s);

/**
 * Frees an element handle. Null is a no-op.
 *
 * # Safety
 * `elem` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void tdf_element_free(struct TdfElement *elem);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* THETADEF_H */
