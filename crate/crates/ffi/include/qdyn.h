#ifndef QDYN_H
#define QDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QdynStatus {
  QDYN_STATUS_OK = 0,
  QDYN_STATUS_NULL_POINTER = 1,
  // A rate, state entry or tolerance is out of its domain.
  QDYN_STATUS_INVALID_ARGUMENT = 2,
  QDYN_STATUS_DIMENSION_MISMATCH = 3,
  // Index past the end of a set, or a dimension above a hard cap.
  QDYN_STATUS_OUT_OF_RANGE = 4,
  QDYN_STATUS_BUFFER_TOO_SMALL = 5,
  QDYN_STATUS_NOT_CONVERGED = 6,
  // The operation is undefined for these rates (e.g. basin needs n = 2).
  QDYN_STATUS_NOT_APPLICABLE = 7,
  QDYN_STATUS_PANIC = 99,
} QdynStatus;

typedef enum QdynStability {
  QDYN_STABILITY_ATTRACTING = 0,
  QDYN_STABILITY_REPELLING = 1,
  QDYN_STABILITY_SADDLE = 2,
  QDYN_STABILITY_NONHYPERBOLIC = 3,
} QdynStability;

typedef enum QdynFate {
  QDYN_FATE_TO_ORIGIN = 0,
  QDYN_FATE_TO_INFINITY = 1,
  QDYN_FATE_TO_FIXED_POINT = 2,
  QDYN_FATE_UNDETERMINED = 3,
} QdynFate;

typedef enum QdynEvidence {
  QDYN_EVIDENCE_REGION_CONTAINMENT = 0,
  QDYN_EVIDENCE_NORM_THRESHOLD = 1,
  QDYN_EVIDENCE_FIXED_POINT_PROXIMITY = 2,
  QDYN_EVIDENCE_ITERATION_CAP = 3,
} QdynEvidence;

typedef enum QdynRegion {
  QDYN_REGION_NONE = 0,
  QDYN_REGION_M1 = 1,
  QDYN_REGION_M2 = 2,
  QDYN_REGION_M3 = 3,
  QDYN_REGION_M4 = 4,
  QDYN_REGION_M5 = 5,
  QDYN_REGION_M6 = 6,
  QDYN_REGION_MBAR1 = 7,
  QDYN_REGION_MBAR2 = 8,
} QdynRegion;

typedef enum QdynBoundaryFlag {
  QDYN_BOUNDARY_FLAG_NONE = 0,
  QDYN_BOUNDARY_FLAG_LOWER_NOT_ORIGIN = 1,
  QDYN_BOUNDARY_FLAG_UPPER_NOT_FOUND = 2,
  QDYN_BOUNDARY_FLAG_UNDETERMINED = 3,
  QDYN_BOUNDARY_FLAG_MULTIPLE_FLIPS = 4,
} QdynBoundaryFlag;

// All 2ⁿ fixed points with their spectra, in support-mask order.
typedef struct QdynFixedPointSet QdynFixedPointSet;

// Validated rate vector.
typedef struct QdynParams QdynParams;

typedef struct QdynFixedPointInfo {
  // Support bits, bit k set when coordinate k is nonzero.
  uint64_t mask;
  // All coordinates ≥ 0.
  bool feasible;
  // ‖H(x) − x‖∞
  double residual;
  enum QdynStability stability;
} QdynFixedPointInfo;

typedef struct QdynFateReport {
  enum QdynFate outcome;
  // Valid when `outcome` is `QDYN_FATE_TO_FIXED_POINT`.
  uint64_t fixed_point_index;
  uint64_t steps_used;
  enum QdynEvidence evidence;
  // Valid when `evidence` is `QDYN_EVIDENCE_REGION_CONTAINMENT`.
  enum QdynRegion region;
} QdynFateReport;

typedef struct QdynBoundarySample {
  double x1;
  double x2_low;
  double x2_high;
  double width;
  enum QdynBoundaryFlag flag;
} QdynBoundarySample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// success. The pointer stays valid until the next call on the same thread.
const char *qdyn_last_error_message(void);

// Static, nul-terminated library version.
const char *qdyn_version(void);

// Validates `theta[0..n]` (n ≥ 2, all finite and > 0) into a new handle.
//
// # Safety
// `theta` must point to `n` readable doubles and `out` to a writable
// pointer slot.
enum QdynStatus qdyn_params_new(const double *theta, size_t n, struct QdynParams **out);

// # Safety
// `params` must come from [`qdyn_params_new`] and not be used afterwards.
// NULL is ignored.
void qdyn_params_free(struct QdynParams *params);

// Dimension n, or 0 for NULL.
//
// # Safety
// `params` must be NULL or a live handle.
size_t qdyn_params_dim(const struct QdynParams *params);

// One application of the operator: `out[0..n] = H(x[0..n])`.
//
// # Safety
// `x` must hold `n` doubles and `out` room for `n`.
enum QdynStatus qdyn_apply(const struct QdynParams *params, const double *x, size_t n, double *out);

// Jacobian at `x`, row-major into `out[0..n*n]`.
//
// # Safety
// `x` must hold `n` doubles and `out` room for `out_len`.
enum QdynStatus qdyn_jacobian(const struct QdynParams *params,
                              const double *x,
                              size_t n,
                              double *out,
                              size_t out_len);

// Enumerates all fixed points, computing each spectrum and classifying it
// with unit-circle band `tau_unit`. Fails with `QDYN_STATUS_OUT_OF_RANGE`
// above the enumeration cap.
//
// # Safety
// `params` must be a live handle and `out` a writable pointer slot.
enum QdynStatus qdyn_fixed_points_new(const struct QdynParams *params,
                                      double tau_unit,
                                      struct QdynFixedPointSet **out);

// # Safety
// `set` must come from [`qdyn_fixed_points_new`] and not be used
// afterwards. NULL is ignored.
void qdyn_fixed_points_free(struct QdynFixedPointSet *set);

// Number of points in the set (2ⁿ), or 0 for NULL.
//
// # Safety
// `set` must be NULL or a live handle.
size_t qdyn_fixed_points_len(const struct QdynFixedPointSet *set);

// # Safety
// `set` must be a live handle and `out` writable.
enum QdynStatus qdyn_fixed_point_info(const struct QdynFixedPointSet *set,
                                      size_t index,
                                      struct QdynFixedPointInfo *out);

// Coordinates of point `index` into `out[0..n]`.
//
// # Safety
// `set` must be a live handle and `out` hold `len` doubles.
enum QdynStatus qdyn_fixed_point_coords(const struct QdynFixedPointSet *set,
                                        size_t index,
                                        double *out,
                                        size_t len);

// Eigenvalues of point `index`, by descending modulus, as real and
// imaginary parts into `re[0..n]` and `im[0..n]`.
//
// # Safety
// `set` must be a live handle; `re` and `im` must each hold `len` doubles.
enum QdynStatus qdyn_fixed_point_eigenvalues(const struct QdynFixedPointSet *set,
                                             size_t index,
                                             double *re,
                                             double *im,
                                             size_t len);

// Fate of the trajectory from `x0` with default thresholds and at most
// `budget` iterations. The last examined state goes to `final_state[0..n]`
// when that pointer is non-NULL.
//
// # Safety
// `x0` must hold `n` doubles, `out` be writable, and `final_state` be NULL
// or hold `final_len` doubles.
enum QdynStatus qdyn_classify_fate(const struct QdynParams *params,
                                   const double *x0,
                                   size_t n,
                                   uint64_t budget,
                                   struct QdynFateReport *out,
                                   double *final_state,
                                   size_t final_len);

// Bisected basin boundary (n = 2 only), one sample per `x1[i]` into
// `out[i]`.
//
// # Safety
// `x1` must hold `count` doubles and `out` room for `count` samples.
enum QdynStatus qdyn_basin_boundary(const struct QdynParams *params,
                                    const double *x1,
                                    size_t count,
                                    double tol,
                                    uint64_t budget,
                                    struct QdynBoundarySample *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDYN_H */
