#pragma once

#include "sscf/matrix_function.hpp"

namespace sscf {

/// Pair {E, F} of the DAE E x' + F x = q.
struct DaePair {
  MatrixFunction E;
  MatrixFunction F;
};

/// Pointwise nonsingular (L, K) acting as E -> LEK, F -> LFK + LEK'.
/// Construction certifies nonsingularity of both factors by sampling. The
/// derivative of K is carried along and maintained by exact calculus rules
/// (Leibniz under composition, the inverse rule under inversion); for long
/// composition chains this is far more accurate than differentiating the
/// composed interpolant.
struct EquivalenceTransform {
  MatrixFunction L;
  MatrixFunction K;
  MatrixFunction Kd;
  SingularCertificate cert_L;
  SingularCertificate cert_K;
};

EquivalenceTransform make_transform(MatrixFunction L, MatrixFunction K,
                                    int cert_grid = defaults::certificate_grid,
                                    double threshold = defaults::singularity_threshold);
EquivalenceTransform make_transform_with_derivative(
    MatrixFunction L, MatrixFunction K, MatrixFunction Kd,
    int cert_grid = defaults::certificate_grid,
    double threshold = defaults::singularity_threshold);
EquivalenceTransform identity_transform(int m, Interval iv);

DaePair apply(const EquivalenceTransform& T, const DaePair& p);

/// T1 first, then T2: K = K1 K2, L = L2 L1.
EquivalenceTransform compose(const EquivalenceTransform& T1,
                             const EquivalenceTransform& T2);

/// (K^{-1}, L^{-1}); maps apply(T, p) back to p.
EquivalenceTransform inverse_transform(const EquivalenceTransform& T, double tol);

struct VerifyReport {
  double residual_E = 0.0;
  double residual_F = 0.0;
  double worst_t = 0.0;
  bool pass = false;
  double tol = 0.0;
  int grid = 0;
};

/// Pointwise residuals ||L E K - E~|| and ||L F K + L E K' - F~|| over the
/// grid, compared against tol.
VerifyReport verify(const EquivalenceTransform& T, const DaePair& p,
                    const DaePair& pt, int grid = defaults::verify_grid,
                    double tol = defaults::check_tol);

struct LemmaResult {
  EquivalenceTransform T;
  MatrixFunction Ehat;
  /// lemma_triangular only: K^{-1} E K' was strictly block-triangular within
  /// tolerance, so H = I + K^{-1} E K' is nonsingular by construction.
  bool triangular_structure = false;
};

/// L := (F K + E K')^{-1}; transforms {E, F} into {Ehat, I}.
LemmaResult lemma_inner(const DaePair& p, const MatrixFunction& K, double tol);

/// For pairs {E, I}: L := (K + E K')^{-1} with H = I + K^{-1} E K'
/// certified nonsingular. Pass K^{-1} when it is known in closed form
/// (e.g. orthogonal K).
LemmaResult lemma_triangular(const MatrixFunction& E, const MatrixFunction& K,
                             double tol,
                             const MatrixFunction* K_inverse_hint = nullptr);

}  // namespace sscf
