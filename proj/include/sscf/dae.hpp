#pragma once

#include "sscf/canon_col.hpp"
#include "sscf/canon_row.hpp"

namespace sscf {

/// Pair {diag(I_d, N), diag(Omega, I_{m-d})}; is_sscf when N is constant
/// (and nilpotent).
struct ScfPair {
  int d = 0;
  MatrixFunction Omega;  // d x d (absent blocks use 0 x 0 sentinel via d == 0)
  MatrixFunction N;      // (m-d) x (m-d)
  bool is_sscf = false;

  int m() const { return d + N.rows(); }
};

ScfPair assemble(const MatrixFunction& Omega, const MatrixFunction& N);
/// d == 0 convenience: pure nilpotent pair {N, I}.
ScfPair assemble_nilpotent(const MatrixFunction& N);

DaePair to_dae_pair(const ScfPair& p);

struct PairCanonResult {
  EquivalenceTransform T;  // block-diagonal lift diag(I_d, T_nilpotent)
  ScfPair sscf;
  VerifyReport report;
};

/// Canonicalizes the nilpotent part with the variant's pipeline and lifts
/// the transform block-diagonally; Omega is untouched.
PairCanonResult canonicalize_pair(const ScfPair& p, const BlockSignature& sig,
                                  SutVariant variant, double tol,
                                  const PipelineOptions& opts = {});

struct JordanResult {
  ScfPair pair;
  EquivalenceTransform T;  // constant K = diag(I_d, P^T), L = diag(I_d, P)
};

/// Conjugates the constant elementary N onto its Jordan form.
JordanResult to_jordan(const ScfPair& sscf);

struct SolveResult {
  MatrixFunction x;  // m x 1
  double residual_norm = 0.0;
  int free_initial_dimension = 0;
};

struct SolveOptions {
  int grid = defaults::verify_grid;
  double rk_tol = 1e-10;
};

/// Dynamic part by an adaptive embedded Runge-Kutta method, algebraic part by
/// the closed-form x2 = sum_k (-1)^k N^k q2^(k) with exact interpolant
/// derivatives. Fails if the a-posteriori residual exceeds 100 * tol.
SolveResult solve_sscf(const ScfPair& sscf, const MatrixFunction& q,
                       const Eigen::VectorXd& x0_dyn, double tol,
                       const SolveOptions& opts = {});

/// max over the grid of ||E x' + F x - q||_inf.
double residual(const DaePair& p, const MatrixFunction& x,
                const MatrixFunction& q, int grid = defaults::verify_grid);

/// x = K x~, q = L^{-1} q~: maps a solution of the transformed system back
/// to the original coordinates and inhomogeneity.
std::pair<MatrixFunction, MatrixFunction> pull_back(const EquivalenceTransform& T,
                                                    const MatrixFunction& x_t,
                                                    const MatrixFunction& q_t,
                                                    double tol = defaults::check_tol);

/// Nilpotency index of a constant matrix (smallest p with N^p = 0).
int nilpotency_index(const Eigen::MatrixXd& N);

}  // namespace sscf
