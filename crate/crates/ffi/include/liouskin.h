#ifndef LIOUSKIN_H
#define LIOUSKIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Values accepted by the `bc` argument of `liouskin_model_new`.
typedef enum LiouskinBoundary {
  LIOUSKIN_BOUNDARY_PERIODIC = 0,
  LIOUSKIN_BOUNDARY_OPEN = 1,
  LIOUSKIN_BOUNDARY_GENERALIZED = 2,
} LiouskinBoundary;

typedef enum LiouskinStatus {
  LIOUSKIN_STATUS_OK = 0,
  LIOUSKIN_STATUS_NULL_POINTER = 1,
  LIOUSKIN_STATUS_INVALID_ARGUMENT = 2,
  LIOUSKIN_STATUS_CAPACITY = 3,
  LIOUSKIN_STATUS_DOMAIN = 4,
  LIOUSKIN_STATUS_UNSUPPORTED = 5,
  LIOUSKIN_STATUS_NUMERIC = 6,
  LIOUSKIN_STATUS_CONVERGENCE = 7,
  LIOUSKIN_STATUS_REJECTED_ROOT = 8,
  LIOUSKIN_STATUS_BUFFER_TOO_SMALL = 9,
  LIOUSKIN_STATUS_PANIC = 10,
  LIOUSKIN_STATUS_OTHER = 11,
} LiouskinStatus;

// Chain parameters.
typedef struct LiouskinModel LiouskinModel;

// Effective operator on the `M`-particle sector, with its basis.
typedef struct LiouskinOperator LiouskinOperator;

// Bethe root sets found by the continuation scan.
typedef struct LiouskinRoots LiouskinRoots;

// Dense spectrum, ascending by real part then imaginary part.
typedef struct LiouskinSpectrum LiouskinSpectrum;

typedef struct LiouskinSteady LiouskinSteady;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next
// failure on the same thread; empty if nothing has failed yet.
const char *liouskin_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *liouskin_version(void);

// `bc` is a `LiouskinBoundary` value. `delta_l` and `delta_r` are ignored
// unless it is generalized.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum LiouskinStatus liouskin_model_new(int32_t bc,
                                       size_t l,
                                       size_t m,
                                       double j,
                                       double phi,
                                       double delta_l,
                                       double delta_r,
                                       struct LiouskinModel **out);

// # Safety
// `model` must come from `liouskin_model_new` and not be freed twice.
void liouskin_model_free(struct LiouskinModel *model);

// # Safety
// `model` must be a live handle; `out` a valid handle slot.
enum LiouskinStatus liouskin_operator_new(const struct LiouskinModel *model,
                                          struct LiouskinOperator **out);

// # Safety
// `op` must be a live handle or null.
void liouskin_operator_free(struct LiouskinOperator *op);

// Sector dimension; 0 for a null handle.
//
// # Safety
// `op` must be a live handle or null.
size_t liouskin_operator_dim(const struct LiouskinOperator *op);

// Stored nonzeros; 0 for a null handle.
//
// # Safety
// `op` must be a live handle or null.
size_t liouskin_operator_nnz(const struct LiouskinOperator *op);

// Basis configurations in index order; bit `j - 1` is site `j`.
//
// # Safety
// `configs` must hold `cap` entries.
enum LiouskinStatus liouskin_operator_configs(const struct LiouskinOperator *op,
                                              uint32_t *configs,
                                              size_t cap);

// Row-major triplets of the operator. All four buffers hold `cap` entries.
//
// # Safety
// Buffers must be valid for `cap` writes.
enum LiouskinStatus liouskin_operator_triplets(const struct LiouskinOperator *op,
                                               size_t *rows,
                                               size_t *cols,
                                               double *re,
                                               double *im,
                                               size_t cap);

// Dense eigenvalues of the operator.
//
// # Safety
// `op` must be a live handle; `out` a valid handle slot.
enum LiouskinStatus liouskin_spectrum_new(const struct LiouskinOperator *op,
                                          struct LiouskinSpectrum **out);

// # Safety
// `spec` must be a live handle or null.
void liouskin_spectrum_free(struct LiouskinSpectrum *spec);

// # Safety
// `spec` must be a live handle or null.
size_t liouskin_spectrum_len(const struct LiouskinSpectrum *spec);

// # Safety
// `re` and `im` must hold `cap` entries.
enum LiouskinStatus liouskin_spectrum_values(const struct LiouskinSpectrum *spec,
                                             double *re,
                                             double *im,
                                             size_t cap);

// Steady state of the sector, with its site profile and imbalance.
//
// # Safety
// `model` must be a live handle; `out` a valid handle slot.
enum LiouskinStatus liouskin_steady_new(const struct LiouskinModel *model,
                                        struct LiouskinSteady **out);

// # Safety
// `st` must be a live handle or null.
void liouskin_steady_free(struct LiouskinSteady *st);

// Number of configurations; 0 for a null handle.
//
// # Safety
// `st` must be a live handle or null.
size_t liouskin_steady_dim(const struct LiouskinSteady *st);

// Chain length; 0 for a null handle.
//
// # Safety
// `st` must be a live handle or null.
size_t liouskin_steady_sites(const struct LiouskinSteady *st);

// Probabilities and their configurations, both `cap` long.
//
// # Safety
// Buffers must be valid for `cap` writes.
enum LiouskinStatus liouskin_steady_probabilities(const struct LiouskinSteady *st,
                                                  uint32_t *configs,
                                                  double *probabilities,
                                                  size_t cap);

// Mean occupation of each site.
//
// # Safety
// `profile` must hold `cap` entries.
enum LiouskinStatus liouskin_steady_profile(const struct LiouskinSteady *st,
                                            double *profile,
                                            size_t cap);

// Right-minus-left imbalance and the solver's residual.
//
// # Safety
// Out pointers may be null to skip a value.
enum LiouskinStatus liouskin_steady_summary(const struct LiouskinSteady *st,
                                            double *imbalance,
                                            double *residual);

// Bethe roots for `M` = 1 or 2.
//
// # Safety
// `model` must be a live handle; `out` a valid handle slot.
enum LiouskinStatus liouskin_roots_new(const struct LiouskinModel *model,
                                       struct LiouskinRoots **out);

// # Safety
// `roots` must be a live handle or null.
void liouskin_roots_free(struct LiouskinRoots *roots);

// # Safety
// `roots` must be a live handle or null.
size_t liouskin_roots_count(const struct LiouskinRoots *roots);

// Energy and relative residual of one root set.
//
// # Safety
// Out pointers may be null to skip a value.
enum LiouskinStatus liouskin_roots_energy(const struct LiouskinRoots *roots,
                                          size_t index,
                                          double *re,
                                          double *im,
                                          double *residual);

// Quasimomenta of one root set; `M` entries.
//
// # Safety
// `re` and `im` must hold `cap` entries.
enum LiouskinStatus liouskin_roots_momenta(const struct LiouskinRoots *roots,
                                           size_t index,
                                           double *re,
                                           double *im,
                                           size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIOUSKIN_H */
