#pragma once

#include <optional>

#include "sscf/equivalence.hpp"
#include "sscf/structure.hpp"
#include "sscf/svd.hpp"

namespace sscf {

struct PipelineOptions {
  int grid = defaults::verify_grid;
  double predicate_tol = defaults::singularity_threshold;
  bool early_exit = false;
};

struct ColStep {
  int k = 0;
  MatrixFunction N;
  std::optional<MatrixFunction> K;  // transform taking step k to k+1
  std::optional<MatrixFunction> H;
  int kappa = 0;
  double row_coincidence_residual = 0.0;
};

struct ColPipelineTrace {
  BlockSignature sig;
  std::vector<ColStep> steps;
  EquivalenceTransform total;
};

/// kappa^(k) = m - sum_{i=1..mu-(k+1)} l_i: trailing rows of the k-th
/// iterate that already coincide with the elementary target.
int kappa_col(const BlockSignature& sig, int k);

/// Step 0: smooth SVDs of the secondary blocks; conjugation by the block
/// diagonal of the U factors puts every secondary block into [R; 0] form
/// with R square nonsingular.
std::pair<SutMatrixFunction, EquivalenceTransform> step0_normalize(
    const SutMatrixFunction& N, double tol, const PipelineOptions& opts = {});

/// K = N (N^(Ec))^T + (I - N^(Ec) (N^(Ec))^T); satisfies K N^(Ec) = N and is
/// block upper triangular with diag(R, I) diagonal blocks.
MatrixFunction build_K_col(const MatrixFunction& Nk, const BlockSignature& sig);

/// The finite iteration: exactly mu-1 steps, each one an equivalence
/// transform {N^(k), I} -> {N^(k+1), I}; the trailing kappa^(k) rows lock
/// onto the elementary target as k grows.
ColPipelineTrace iterate_col(const SutMatrixFunction& N0,
                             const EquivalenceTransform& T0, double tol,
                             const PipelineOptions& opts = {});

struct ColCanonResult {
  EquivalenceTransform T;
  Eigen::MatrixXd Nc;
  ColPipelineTrace trace;
  VerifyReport report;
};

/// Full column pipeline: predicate check, step 0, iteration, verification of
/// the composed transform against {N^(Ec), I}.
ColCanonResult canonicalize_col(const SutMatrixFunction& N, double tol,
                                const PipelineOptions& opts = {});

}  // namespace sscf
