#pragma once

#include <optional>

#include "sscf/canon_col.hpp"

namespace sscf {

struct RowStep {
  int k = 0;
  MatrixFunction N;
  std::optional<MatrixFunction> K;  // transform taking step k to k+1
  std::optional<MatrixFunction> H;
  int lambda = 0;
  double col_coincidence_residual = 0.0;
};

struct RowPipelineTrace {
  BlockSignature sig;
  std::vector<RowStep> steps;
  EquivalenceTransform total;
};

/// lambda_k = sum_{i=1..k+1} l_i: leading columns of the k-th iterate that
/// already coincide with the elementary target (mirror of kappa^(k)).
int lambda_row(const BlockSignature& sig, int k);

/// Step 0: smooth SVDs and conjugation by the block diagonal of the V
/// factors, followed by the constant within-block reversal permutations that
/// flip every secondary block into [0 R] form.
std::pair<SutMatrixFunction, EquivalenceTransform> step0_normalize_row(
    const SutMatrixFunction& N, double tol, const PipelineOptions& opts = {});

/// K = (N^(Er))^T N + (I - (N^(Er))^T N^(Er)); satisfies N^(Er) K = N with
/// the R blocks rearranged onto the diagonal.
MatrixFunction build_K_row(const MatrixFunction& Nk, const BlockSignature& sig);

RowPipelineTrace iterate_row(const SutMatrixFunction& N0,
                             const EquivalenceTransform& T0, double tol,
                             const PipelineOptions& opts = {});

struct RowCanonResult {
  EquivalenceTransform T;
  Eigen::MatrixXd Nr;
  RowPipelineTrace trace;
  VerifyReport report;
};

RowCanonResult canonicalize_row(const SutMatrixFunction& N, double tol,
                                const PipelineOptions& opts = {});

}  // namespace sscf
