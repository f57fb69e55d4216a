#ifndef CAVITY_ENTANGLE_H
#define CAVITY_ENTANGLE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  CE_STATUS_OK = 0,
  CE_STATUS_NULL_POINTER = 1,
  CE_STATUS_INVALID_ARGUMENT = 2,
  CE_STATUS_NOT_HERMITIAN = 3,
  CE_STATUS_PANIC = 4,
} CeStatus;

/**
 * Opaque solver handle.
 */
typedef struct CeSolver CeSolver;

/**
 * Model parameters. `omega` is in units of g.
 */
typedef struct {
  double nbar;
  double alpha;
  double omega;
  double tail_tolerance;
} CeParams;

/**
 * Product of `cos(theta) |+> + e^{i phi} sin(theta) |->` for each atom.
 */
typedef struct {
  double theta1;
  double theta2;
  double phi1;
  double phi2;
} CeAtomicState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Defaults: vacuum field, no dipole coupling, resonant frame at rest,
 * thermal tail tolerance 1e-10.
 */
CeParams ce_default_params(void);

/**
 * Creates a solver. On success `*out` owns a handle that must be released
 * with [`ce_solver_free`].
 *
 * # Safety
 * `params` must point to a valid `CeParams`; `out` must be writable.
 */
CeStatus ce_solver_new(const CeParams *params, CeSolver **out);

/**
 * Releases a handle from [`ce_solver_new`]. Null is ignored.
 *
 * # Safety
 * `solver` must be null or a handle not yet freed.
 */
void ce_solver_free(CeSolver *solver);

/**
 * Largest photon number kept in the thermal average.
 *
 * # Safety
 * `solver` must be a live handle; `out` must be writable.
 */
CeStatus ce_solver_cutoff(const CeSolver *solver, size_t *out);

/**
 * Reduced two-atom density matrix at time `gt`.
 *
 * # Safety
 * `solver` must be a live handle, `state` valid, and `re`, `im` must each
 * have room for 16 doubles.
 */
CeStatus ce_reduced_density(const CeSolver *solver,
                            const CeAtomicState *state,
                            double gt,
                            double *re,
                            double *im);

/**
 * Negativity at each point of an ascending time grid of length `len`.
 *
 * # Safety
 * `solver` must be a live handle, `state` valid, and `grid` and `out` must
 * each hold `len` doubles.
 */
CeStatus ce_negativity_series(const CeSolver *solver,
                              const CeAtomicState *state,
                              const double *grid,
                              size_t len,
                              double *out);

/**
 * Negativity of an arbitrary two-qubit density matrix given as row-major
 * real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must each hold 16 doubles; `out` must be writable.
 */
CeStatus ce_negativity(const double *re, const double *im, double *out);

/**
 * Message for the most recent failure on this thread, or an empty string.
 * Valid until the next call into this library from the same thread.
 */
const char *ce_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ce_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_ENTANGLE_H */
