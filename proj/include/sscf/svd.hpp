#pragma once

#include "sscf/matrix_function.hpp"

namespace sscf {

/// Smooth SVD factors: U (rows x rows), S (rows x cols, diagonal pattern),
/// V (cols x cols), with M = U S V^T and orthogonal U, V on the interval.
struct SvdTriple {
  MatrixFunction U;
  MatrixFunction S;
  MatrixFunction V;
  int rank = 0;
};

struct SvdOptions {
  double rank_gap_tol = defaults::rank_gap_tol;
  int initial_degree = 16;
  int max_degree = defaults::degree_cap;
};

/// Pointwise SVDs at Chebyshev nodes, aligned node-to-node (assignment over
/// the paired singular directions, joint sign fixing, Procrustes on the
/// orthogonal-complement blocks), then refit. Requires constant rank on the
/// sampling grid.
SvdTriple smooth_svd(const MatrixFunction& M, double tol,
                     const SvdOptions& opts = {});

namespace detail {

/// Minimum-cost assignment on a square cost matrix; returns the column
/// assigned to each row.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost);

/// Nearest orthogonal matrix (polar factor) of A.
Eigen::MatrixXd polar_orthogonal(const Eigen::MatrixXd& A);

}  // namespace detail

}  // namespace sscf
