#ifndef QRE_H
#define QRE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QreStatus {
  QRE_STATUS_OK = 0,
  QRE_STATUS_NULL_POINTER = 1,
  QRE_STATUS_INVALID_ARGUMENT = 2,
  QRE_STATUS_PARSE = 3,
  QRE_STATUS_DIMENSION = 4,
  QRE_STATUS_CAPABILITY = 5,
  QRE_STATUS_IO = 6,
  QRE_STATUS_OVERFLOW = 7,
  /**
   * The solver finished without a usable result.
   */
  QRE_STATUS_NOT_SOLVED = 8,
  QRE_STATUS_PANIC = 9,
} QreStatus;

typedef enum QreRelation {
  QRE_RELATION_QUBIT_WISE = 0,
  QRE_RELATION_FULL = 1,
} QreRelation;

typedef enum QreStrategy {
  QRE_STRATEGY_NAIVE = 0,
  QRE_STRATEGY_GROUPED = 1,
  QRE_STRATEGY_CANCEL = 2,
} QreStrategy;

/**
 * Opaque Hamiltonian handle.
 */
typedef struct QreHamiltonian QreHamiltonian;

typedef struct QreGateCount {
  uint64_t n_1q;
  uint64_t n_2q;
  uint64_t depth;
} QreGateCount;

typedef struct QreQpePlan {
  double t;
  double dt;
  /**
   * Energy-shift coefficient that set `dt`.
   */
  double e1;
  uint64_t n_t;
  uint64_t n_c;
  uint64_t n_q;
  /**
   * False when `t` came from the norm bound instead of the exact norm.
   */
  bool norm_exact;
} QreQpePlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next `qre_` call on
 * the same thread.
 */
const char *qre_last_error(void);

/**
 * Builds the spinless Fermi-Hubbard Hamiltonian on an open `nx × ny` lattice.
 *
 * # Safety
 * `out` must be valid for a pointer write. On success `*out` owns a handle
 * that must be released with [`qre_hamiltonian_free`].
 */
enum QreStatus qre_hubbard(size_t nx,
                           size_t ny,
                           double t,
                           double u,
                           double mu,
                           struct QreHamiltonian **out);

/**
 * Loads a Hamiltonian text file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for a pointer
 * write. Release the result with [`qre_hamiltonian_free`].
 */
enum QreStatus qre_hamiltonian_load(const char *path, struct QreHamiltonian **out);

/**
 * Writes a Hamiltonian text file atomically.
 *
 * # Safety
 * `h` must be a live handle and `path` a NUL-terminated string.
 */
enum QreStatus qre_hamiltonian_save(const struct QreHamiltonian *h, const char *path);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from this library that has not been freed.
 */
void qre_hamiltonian_free(struct QreHamiltonian *h);

/**
 * Qubit count and non-identity term count.
 *
 * # Safety
 * `h` must be a live handle; `n_qubits` and `n_terms` valid for writes.
 */
enum QreStatus qre_hamiltonian_counts(const struct QreHamiltonian *h,
                                      size_t *n_qubits,
                                      size_t *n_terms);

/**
 * Dense ground-state energy. Fails with `Capability` above the dense cap.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_ground_energy(const struct QreHamiltonian *h, double *out);

/**
 * Number of sorted-insertion measurement groups.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_group_count(const struct QreHamiltonian *h, enum QreRelation rel, size_t *out);

/**
 * Worst-case (maximally mixed) shot count at precision `epsilon`.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_mm_shots(const struct QreHamiltonian *h,
                            enum QreRelation rel,
                            double epsilon,
                            uint64_t *out);

/**
 * Gate counts of a single Trotter step of length `t`.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_trotter_counts(const struct QreHamiltonian *h,
                                  double t,
                                  enum QreStrategy strat,
                                  struct QreGateCount *out);

/**
 * `n_t · (3·n_1q + 6·n_2q)`; `Overflow` when the result exceeds 64 bits.
 *
 * # Safety
 * `base` must point to a readable count; `out` valid for a write.
 */
enum QreStatus qre_controlled_trotter_cost(uint64_t n_t,
                                           const struct QreGateCount *base,
                                           uint64_t *out);

/**
 * Trotter-step plan for phase estimation at precision `epsilon`. Uses the
 * exact symmetric energy shift when the system is small enough, otherwise
 * the closed-form bound.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_qpe_plan(const struct QreHamiltonian *h,
                            double epsilon,
                            enum QreStrategy strat,
                            struct QreQpePlan *out);

/**
 * Krylov energy at dimension `d` with exact evolution and the default time
 * step. `delta` is the overlap threshold; pass 0 for none. Returns
 * `NotSolved` when the generalized eigenproblem fails.
 *
 * # Safety
 * `h` must be a live handle; `out` valid for a write.
 */
enum QreStatus qre_krylov_energy(const struct QreHamiltonian *h,
                                 double overlap_sq,
                                 size_t d,
                                 uint64_t seed,
                                 double delta,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QRE_H */
