#ifndef SUPERPOSE_H
#define SUPERPOSE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_ARGUMENT = 2,
  SP_STATUS_INVALID_SAMPLE = 3,
  SP_STATUS_LEVEL_NOT_FOUND = 4,
  SP_STATUS_NO_CONVERGENCE = 5,
  SP_STATUS_PARSE = 6,
  SP_STATUS_IO = 7,
  SP_STATUS_INTERNAL = 8,
} SpStatus;

// A function pair `g(x) + h(y)`.
typedef struct SpDecomposition SpDecomposition;

// A sample of points with function values.
typedef struct SpSample SpSample;

// Scalar summary of a decomposition. Absent values are `-1` for integers
// and NaN for reals.
typedef struct SpMeta {
  int32_t level;
  double epsilon;
  double delta;
  int64_t big_f;
  uintptr_t iterations;
  double sup_residual;
  // Every pass ran at a certified level.
  bool certified;
} SpMeta;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a
// successful call. Valid until the next call into the library.
const char *sp_last_error_message(void);

// Builds a sample from `len` aligned coordinates and values.
//
// # Safety
// `xs`, `ys` and `fs` must each point to `len` readable doubles and `out`
// must be writable.
enum SpStatus sp_sample_new(const double *xs,
                            const double *ys,
                            const double *fs,
                            uintptr_t len,
                            struct SpSample **out);

// # Safety
// `sample` must be null or a handle from [`sp_sample_new`] not yet freed.
void sp_sample_free(struct SpSample *sample);

// Number of points, 0 for a null handle.
//
// # Safety
// `sample` must be null or a live handle.
uintptr_t sp_sample_len(const struct SpSample *sample);

// One approximation pass. `delta <= 0` or NaN estimates delta from the
// sample; `level < 0` searches for the smallest certified level.
//
// # Safety
// `sample` must be a live handle and `out` writable.
enum SpStatus sp_decompose(const struct SpSample *sample,
                           double epsilon,
                           double delta,
                           int32_t level,
                           uint32_t n_max,
                           struct SpDecomposition **out);

// Repeated passes until the sup residual is at most `tol`.
//
// # Safety
// `sample` must be a live handle and `out` writable.
enum SpStatus sp_refine(const struct SpSample *sample,
                        double tol,
                        uintptr_t max_iter,
                        uint32_t n_max,
                        struct SpDecomposition **out);

// # Safety
// `d` must be null or a live decomposition handle.
void sp_decomposition_free(struct SpDecomposition *d);

// # Safety
// `d` must be a live handle and `out` writable.
enum SpStatus sp_eval_g(const struct SpDecomposition *d, double x, double *out);

// # Safety
// `d` must be a live handle and `out` writable.
enum SpStatus sp_eval_h(const struct SpDecomposition *d, double y, double *out);

// `g(x) + h(y)`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum SpStatus sp_eval(const struct SpDecomposition *d, double x, double y, double *out);

// # Safety
// `d` must be a live handle and `out` writable.
enum SpStatus sp_decomposition_meta(const struct SpDecomposition *d, struct SpMeta *out);

// Serializes `d` as the JSON document the command-line tool writes. With a
// non-null `sample` the document includes a bound report.
//
// # Safety
// `d` must be a live handle, `sample` null or live, and `out` writable.
// Release the string with [`sp_string_free`].
enum SpStatus sp_decomposition_to_json(const struct SpDecomposition *d,
                                       const struct SpSample *sample,
                                       char **out);

// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum SpStatus sp_decomposition_from_json(const char *json, struct SpDecomposition **out);

// Searches for an array of `max_len` segments. `*found` is set to 1 when
// one exists; if `certificate` is non-null it then receives a JSON
// description (release with [`sp_string_free`]), otherwise null.
//
// # Safety
// `sample` must be a live handle, `found` writable, `certificate` null or
// writable.
enum SpStatus sp_check_arrays(const struct SpSample *sample,
                              uintptr_t max_len,
                              double tol,
                              int32_t *found,
                              char **certificate);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void sp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPERPOSE_H */
