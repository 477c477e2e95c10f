#pragma once

#include <map>
#include <vector>

#include "sscf/matrix_function.hpp"

namespace sscf {

enum class SutVariant { plain, columns, rows };

const char* to_string(SutVariant v);
SutVariant sut_variant_from_string(const std::string& s);

/// Block layout (l_1..l_mu) of a strictly upper block-triangular matrix
/// function; mu >= 2 and all block sizes positive.
struct BlockSignature {
  std::vector<int> ells;

  BlockSignature() = default;
  explicit BlockSignature(std::vector<int> e);

  int mu() const { return static_cast<int>(ells.size()); }
  int m() const;
  bool column_ordered() const;  // l_1 >= ... >= l_mu
  bool row_ordered() const;     // l_1 <= ... <= l_mu
  /// Start index of each block plus the final total, size mu()+1.
  std::vector<int> offsets() const;

  bool operator==(const BlockSignature&) const = default;
};

/// Canonical invariants (r, mu, theta_0..theta_{mu-2}, d) of a regular pair
/// of total dimension m. theta_{mu-1} = 0 is implicit and not stored.
struct Characteristics {
  int m = 0;
  int r = 0;
  int mu = 0;
  std::vector<int> thetas;
  int d = 0;

  bool operator==(const Characteristics&) const = default;
};

struct SutMatrixFunction {
  MatrixFunction N;
  BlockSignature sig;
  SutVariant variant = SutVariant::plain;
};

/// True iff every block on or below the block diagonal vanishes within tol
/// on the verification grid.
bool is_sut(const MatrixFunction& N, const BlockSignature& sig, double tol,
            int grid = defaults::verify_grid);

/// SUT plus full column rank of every secondary block, certified by the
/// smallest retained singular value exceeding tol uniformly on the grid.
bool is_sut_columns(const MatrixFunction& N, const BlockSignature& sig,
                    double tol, int grid = defaults::verify_grid);
bool is_sut_rows(const MatrixFunction& N, const BlockSignature& sig,
                 double tol, int grid = defaults::verify_grid);

/// Constant elementary matrix with secondary blocks [I; 0] (column variant,
/// needs column-ordered sig).
Eigen::MatrixXd elementary_col(const BlockSignature& sig);
/// Secondary blocks [0 I]; needs row-ordered sig.
Eigen::MatrixXd elementary_row(const BlockSignature& sig);

/// Numerical rank with a relative singular-value threshold.
int numerical_rank(const Eigen::MatrixXd& A, double rel_tol = 1e-8);

/// Ranks of N^1, N^2, ... until the first vanishing power (inclusive).
std::vector<int> ranks_of_powers(const Eigen::MatrixXd& N, double rel_tol = 1e-8);

/// Invariants of a constant nilpotent N belonging to a pair with rank(E) =
/// r_total and dynamic dimension d; checks d = r - sum(theta).
Characteristics characteristics_from_nilpotent(const Eigen::MatrixXd& N,
                                               int r_total, int d,
                                               double rank_rel_tol = 1e-8);

/// Block sizes of the elementary form for given characteristics.
/// column: l_1 = m - r, l_{i+1} = theta_{i-1};  row: mirrored.
BlockSignature signature_from_characteristics(const Characteristics& c,
                                              int m_nilpotent, SutVariant variant);

/// Multiset order -> count of nilpotent Jordan blocks; m is the full pair
/// dimension, so the orders sum to m - d.
std::map<int, int> jordan_blocks(const Characteristics& c, int m);

/// Permutation p (new index -> old index) such that conjugating the
/// elementary matrix yields a direct sum of Jordan blocks in decreasing
/// order of size.
std::vector<int> jordan_permutation(const BlockSignature& sig, SutVariant variant);

/// P M P^T for the permutation p (new index -> old index).
Eigen::MatrixXd permute_similarity(const std::vector<int>& p, const Eigen::MatrixXd& M);

/// Direct sum of nilpotent Jordan blocks for the given order multiset,
/// decreasing order of size.
Eigen::MatrixXd jordan_matrix(const std::map<int, int>& blocks);

}  // namespace sscf
