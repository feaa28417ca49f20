#ifndef CLIFFKERN_H
#define CLIFFKERN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum CkStatus {
  CkStatus_Ok = 0,
  CkStatus_NullPointer = 1,
  CkStatus_InvalidUtf8 = 2,
  CkStatus_DimensionMismatch = 3,
  CkStatus_NotSymmetric = 4,
  CkStatus_NoConvergence = 5,
  CkStatus_IterationLimit = 6,
  CkStatus_Singular = 7,
  CkStatus_Degenerate = 8,
  CkStatus_OutsideDomain = 9,
  CkStatus_SpaceMismatch = 10,
  CkStatus_TooLarge = 11,
  CkStatus_InvalidArgument = 12,
  CkStatus_UnsupportedTag = 13,
  CkStatus_Parse = 14,
  CkStatus_Panic = 15,
} CkStatus;

/**
 * Symmetry class of a Fock kernel.
 */
typedef enum CkSymmetry {
  CkSymmetry_Tensor = 0,
  CkSymmetry_Sym = 1,
  CkSymmetry_Antisym = 2,
} CkSymmetry;

/**
 * Boundary condition of the discrete Green operator.
 */
typedef enum CkBoundary {
  CkBoundary_Dirichlet = 0,
  CkBoundary_Neumann = 1,
} CkBoundary;

typedef struct CkCliffordSpace CkCliffordSpace;

typedef struct CkFunctional CkFunctional;

typedef struct CkKernel CkKernel;

typedef struct CkMultivector CkMultivector;

typedef struct CkQuadraticForm CkQuadraticForm;

typedef struct CkSignature {
  uintptr_t n_plus;
  uintptr_t n_minus;
  uintptr_t n_zero;
} CkSignature;

typedef struct CkTensorNorms {
  double injective;
  double projective;
  double hs;
  double sigma;
} CkTensorNorms;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * owned by the library and stays valid until the next call on this thread.
 */
const char *ck_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ck_version(void);

/**
 * Releases a string returned by the library.
 */
void ck_string_free(char *s);

/**
 * Symmetric form from a row-major `dim x dim` matrix.
 */
enum CkStatus ck_quadratic_new(uintptr_t dim, const double *coeffs, struct CkQuadraticForm **out);

void ck_quadratic_free(struct CkQuadraticForm *q);

uintptr_t ck_quadratic_dim(const struct CkQuadraticForm *q);

enum CkStatus ck_quadratic_eval(const struct CkQuadraticForm *q,
                                const double *x,
                                uintptr_t len,
                                double *out);

enum CkStatus ck_quadratic_polarize(const struct CkQuadraticForm *q,
                                    const double *x,
                                    const double *y,
                                    uintptr_t len,
                                    double *out);

/**
 * Signature with the default relative zero tolerance.
 */
enum CkStatus ck_quadratic_signature(const struct CkQuadraticForm *q, struct CkSignature *out);

/**
 * Eigenvalues (length `dim`) and optionally the eigenvectors, vector `k`
 * in row `k` of a row-major `dim x dim` array.
 */
enum CkStatus ck_quadratic_diagonalize(const struct CkQuadraticForm *q,
                                       double *values,
                                       double *vectors);

/**
 * Clifford space with generator squares `diag[0..n]`.
 */
enum CkStatus ck_clifford_space_new(const double *diag, uintptr_t n, struct CkCliffordSpace **out);

void ck_clifford_space_free(struct CkCliffordSpace *space);

uintptr_t ck_clifford_space_dim(const struct CkCliffordSpace *space);

uintptr_t ck_clifford_space_blade_count(const struct CkCliffordSpace *space);

/**
 * Parses expressions such as `1 + 2*e1e2 - e3`.
 */
enum CkStatus ck_multivector_parse(const struct CkCliffordSpace *space,
                                   const char *expr,
                                   struct CkMultivector **out);

enum CkStatus ck_multivector_from_vector(const struct CkCliffordSpace *space,
                                         const double *x,
                                         uintptr_t len,
                                         struct CkMultivector **out);

/**
 * `c e_B` for the blade whose generators are the set bits of `mask`
 * (bit 0 is `e1`).
 */
enum CkStatus ck_multivector_blade(const struct CkCliffordSpace *space,
                                   uint32_t mask,
                                   double c,
                                   struct CkMultivector **out);

void ck_multivector_free(struct CkMultivector *mv);

/**
 * Geometric product `a b`.
 */
enum CkStatus ck_multivector_mul(const struct CkMultivector *a,
                                 const struct CkMultivector *b,
                                 struct CkMultivector **out);

enum CkStatus ck_multivector_wedge(const struct CkMultivector *a,
                                   const struct CkMultivector *b,
                                   struct CkMultivector **out);

enum CkStatus ck_multivector_add(const struct CkMultivector *a,
                                 const struct CkMultivector *b,
                                 struct CkMultivector **out);

enum CkStatus ck_multivector_sub(const struct CkMultivector *a,
                                 const struct CkMultivector *b,
                                 struct CkMultivector **out);

enum CkStatus ck_multivector_reverse(const struct CkMultivector *a, struct CkMultivector **out);

enum CkStatus ck_multivector_grade(const struct CkMultivector *a,
                                   uintptr_t k,
                                   struct CkMultivector **out);

/**
 * Coefficient of the blade `mask`; 0 for blades not present.
 */
enum CkStatus ck_multivector_coefficient(const struct CkMultivector *a, uint32_t mask, double *out);

/**
 * Number of stored (nonzero) terms.
 */
uintptr_t ck_multivector_len(const struct CkMultivector *a);

/**
 * Grade of a blade mask.
 */
uintptr_t ck_blade_grade(uint32_t mask);

/**
 * JSON form `{"n":..,"diag":[..],"terms":[{"blades":[..],"c":..}]}`,
 * released with `ck_string_free`.
 */
enum CkStatus ck_multivector_to_json(const struct CkMultivector *a, char **out);

/**
 * Built-in functional by name (`power`, `double_well`, `minkowski`).
 * `p` is ignored when NaN and `n` when 0.
 */
enum CkStatus ck_functional_builtin(const char *name,
                                    double p,
                                    uintptr_t n,
                                    struct CkFunctional **out);

void ck_functional_free(struct CkFunctional *f);

uintptr_t ck_functional_dim(const struct CkFunctional *f);

enum CkStatus ck_functional_eval(const struct CkFunctional *f,
                                 const double *y,
                                 uintptr_t len,
                                 double *out);

/**
 * `x* = f'(y)` (written to `x_star[0..len]`) and `z* = f(y) - <y, x*>`.
 */
enum CkStatus ck_functional_legendre_point(const struct CkFunctional *f,
                                           const double *y,
                                           uintptr_t len,
                                           double *x_star,
                                           double *z_star);

/**
 * Solves `f'(y) = x*` by damped Newton from `start` (or `x*` when NULL).
 */
enum CkStatus ck_functional_legendre_invert(const struct CkFunctional *f,
                                            const double *x_star,
                                            const double *start,
                                            uintptr_t len,
                                            double tol,
                                            uintptr_t max_iter,
                                            double *y);

/**
 * Row-major `(f*)''(x*)` by differences of `z*` and `(f''(y))^-1`, each
 * `len x len`. Either output may be NULL.
 */
enum CkStatus ck_functional_legendre_hessians(const struct CkFunctional *f,
                                              const double *y,
                                              uintptr_t len,
                                              double *fstar_hess,
                                              double *inverse_hess);

/**
 * Injective, projective, Hilbert-Schmidt and AGM norms of a row-major
 * `rows x cols` tensor.
 */
enum CkStatus ck_tensor2_norms(uintptr_t rows,
                               uintptr_t cols,
                               const double *entries,
                               struct CkTensorNorms *out);

/**
 * Polynomial kernel of degree `n` expanded at `c` on `[a, b]`.
 */
enum CkStatus ck_kernel_poly(double a, double b, double c, uintptr_t n, struct CkKernel **out);

/**
 * `min(s - a, t - a)` on `[a, b]`.
 */
enum CkStatus ck_kernel_sobolev(double a, double b, struct CkKernel **out);

/**
 * Periodic kernel `kappa * sum_p cos(p (t - s)) / p^2` on `[0, 2 pi]`;
 * `terms = 0` selects the closed form.
 */
enum CkStatus ck_kernel_fourier(double kappa, uintptr_t terms, struct CkKernel **out);

void ck_kernel_free(struct CkKernel *k);

enum CkStatus ck_kernel_eval(const struct CkKernel *k, double s, double t, double *out);

/**
 * Row-major `m x m` Gram matrix `H(p_i, p_j)`.
 */
enum CkStatus ck_kernel_gram(const struct CkKernel *k,
                             const double *points,
                             uintptr_t m,
                             double *out);

/**
 * Fock kernel of the point evaluations `a[0..m]` and `b[0..m]` with
 * pairing `H(t, s)`.
 */
enum CkStatus ck_kernel_fock(const struct CkKernel *k,
                             const double *a,
                             const double *b,
                             uintptr_t m,
                             enum CkSymmetry symmetry,
                             double *out);

/**
 * Discrete Green kernel of `sum_p (-1)^p w_p d^{2p}/dx^{2p}` on `m`
 * interior nodes of `[a, b]`. Writes `m` nodes and the row-major `m x m`
 * kernel values.
 */
enum CkStatus ck_green_matrix_1d(const double *weights,
                                 uintptr_t n_weights,
                                 double a,
                                 double b,
                                 uintptr_t m,
                                 enum CkBoundary bc,
                                 double *nodes,
                                 double *values);

/**
 * Permanent of a row-major `n x n` matrix (Ryser).
 */
enum CkStatus ck_permanent(const double *a, uintptr_t n, double *out);

/**
 * Oracle verdicts on the printed formulas as JSON, released with
 * `ck_string_free`.
 */
enum CkStatus ck_ledger_json(uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLIFFKERN_H */
