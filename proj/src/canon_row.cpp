#include "sscf/canon_row.hpp"

#include <sstream>

#include "sscf/util.hpp"

namespace sscf {

namespace {

// Mirror of the column-side structural projection: exact zeros on and below
// the block diagonal, and columns that already agree with the elementary
// target within snap_tol become its exact constant columns.
MatrixFunction snap_to_structure_cols(const MatrixFunction& N, const BlockSignature& sig,
                                      const Eigen::MatrixXd& target, double snap_tol,
                                      int grid) {
  const int m = N.rows();
  const int deg = N.degree();
  const auto off = sig.offsets();
  const auto ts = chebyshev_grid(N.interval(), grid);
  Eigen::VectorXd col_dev = Eigen::VectorXd::Zero(m);
  for (const double t : ts) {
    const Eigen::MatrixXd diff = N.eval(t) - target;
    for (int c = 0; c < m; ++c)
      col_dev(c) = std::max(col_dev(c), diff.col(c).cwiseAbs().maxCoeff());
  }
  std::vector<double> flat(static_cast<size_t>(m) * m * (deg + 1), 0.0);
  auto put = [&](int i, int j, int k, double v) {
    flat[(static_cast<size_t>(i) * m + j) * (deg + 1) + k] = v;
  };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double* c = N.entry(i, j);
      for (int k = 0; k <= deg; ++k) put(i, j, k, c[k]);
    }
  }
  for (int bi = 0; bi < sig.mu(); ++bi)
    for (int bj = 0; bj <= bi; ++bj)
      for (int i = off[static_cast<size_t>(bi)]; i < off[static_cast<size_t>(bi) + 1]; ++i)
        for (int j = off[static_cast<size_t>(bj)]; j < off[static_cast<size_t>(bj) + 1]; ++j)
          for (int k = 0; k <= deg; ++k) put(i, j, k, 0.0);
  for (int c = 0; c < m; ++c) {
    if (col_dev(c) > snap_tol) continue;
    for (int i = 0; i < m; ++i) {
      put(i, c, 0, target(i, c));
      for (int k = 1; k <= deg; ++k) put(i, c, k, 0.0);
    }
  }
  return MatrixFunction(m, m, N.interval(), deg, std::move(flat), N.fit_tol())
      .compressed(1e-15);
}

// Count of leading columns that are exactly unit columns at the coefficient
// level (produced by the snap above).
int exact_identity_prefix(const MatrixFunction& K) {
  const int m = K.rows();
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < m; ++i) {
      const double* c = K.entry(i, s);
      if (c[0] != (i == s ? 1.0 : 0.0)) return s;
      for (int k = 1; k <= K.degree(); ++k)
        if (c[k] != 0.0) return s;
    }
  }
  return m;
}

// Inverse of [[I_s, B], [0, C]] assembled as [[I_s, -B C^{-1}], [0, C^{-1}]]
// so the exact identity prefix survives the inversion.
MatrixFunction inverse_with_identity_prefix(const MatrixFunction& Klem, int s,
                                            double tol) {
  const int m = Klem.rows();
  if (s <= 0 || s >= m) return inverse(Klem, tol);
  const Interval iv = Klem.interval();
  const int r = m - s;
  const MatrixFunction B = Klem.block(0, s, s, r);
  const MatrixFunction C = Klem.block(s, s, r, r);
  const MatrixFunction Cinv = inverse(C, tol);
  const MatrixFunction top =
      hstack({MatrixFunction::identity(s, iv), scale(mul(B, Cinv), -1.0)});
  const MatrixFunction bottom = hstack({MatrixFunction::zero(r, s, iv), Cinv});
  return vstack({top, bottom});
}

double leading_cols_residual(const MatrixFunction& N, const Eigen::MatrixXd& target,
                             int cols_from_left, int grid) {
  if (cols_from_left <= 0) return 0.0;
  const auto ts = chebyshev_grid(N.interval(), grid);
  double worst = 0.0;
  for (const double t : ts) {
    const Eigen::MatrixXd diff = N.eval(t) - target;
    worst = std::max(worst, max_abs(diff.leftCols(cols_from_left)));
  }
  return worst;
}

Eigen::MatrixXd reversal(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, n - 1 - i) = 1.0;
  return J;
}

}  // namespace

int lambda_row(const BlockSignature& sig, int k) {
  int sum = 0;
  for (int i = 0; i <= k && i < sig.mu(); ++i) sum += sig.ells[static_cast<size_t>(i)];
  return sum;
}

std::pair<SutMatrixFunction, EquivalenceTransform> step0_normalize_row(
    const SutMatrixFunction& Nin, double tol, const PipelineOptions& opts) {
  const BlockSignature& sig = Nin.sig;
  const auto off = sig.offsets();
  const int mu = sig.mu();
  const Interval iv = Nin.N.interval();
  const double svd_tol = std::max(tol * 1e-4, 1e-12);

  // B_V carries I on the first block and the V factor of block (i, i+1) on
  // block position i+1.
  std::vector<MatrixFunction> diag;
  diag.reserve(static_cast<size_t>(mu));
  diag.push_back(MatrixFunction::identity(sig.ells[0], iv));
  for (int i = 0; i + 1 < mu; ++i) {
    const MatrixFunction blk = Nin.N.block(off[static_cast<size_t>(i)], off[static_cast<size_t>(i + 1)],
                                           sig.ells[static_cast<size_t>(i)], sig.ells[static_cast<size_t>(i + 1)]);
    SvdTriple svd = smooth_svd(blk, svd_tol);
    diag.push_back(std::move(svd.V));
  }
  const MatrixFunction B_V = block_diag(diag);
  const MatrixFunction B_V_t = B_V.transpose();

  LemmaResult lem = lemma_triangular(Nin.N, B_V, tol, &B_V_t);

  // Constant conjugation by within-block reversals moves each [R~ 0] to [0 R].
  std::vector<MatrixFunction> flips;
  flips.reserve(static_cast<size_t>(mu));
  for (int i = 0; i < mu; ++i)
    flips.push_back(MatrixFunction::constant(reversal(sig.ells[static_cast<size_t>(i)]), iv));
  const MatrixFunction P = block_diag(flips);
  EquivalenceTransform flipT = make_transform(P, P.transpose());

  MatrixFunction N0 = mul(mul(P, lem.Ehat), P.transpose());
  EquivalenceTransform T = compose(lem.T, flipT);

  // Mirror zero-column property: the leading l_2 columns vanish.
  const int zero_cols = sig.ells[1];
  const double zc = leading_cols_residual(
      N0, Eigen::MatrixXd::Zero(sig.m(), sig.m()), zero_cols, opts.grid);
  if (zc > tol) {
    std::ostringstream os;
    os << "step0_normalize_row: leading " << zero_cols
       << " columns fail to vanish, residual " << zc;
    throw NonConvergenceError(os.str());
  }
  return {SutMatrixFunction{std::move(N0), sig, SutVariant::rows}, T};
}

MatrixFunction build_K_row(const MatrixFunction& Nk, const BlockSignature& sig) {
  const Eigen::MatrixXd NEr = elementary_row(sig);
  const Interval iv = Nk.interval();
  const MatrixFunction cleaned =
      snap_to_structure_cols(Nk, sig, NEr, 1e-7, defaults::verify_grid);
  const MatrixFunction proj = MatrixFunction::constant(
      Eigen::MatrixXd::Identity(sig.m(), sig.m()) - NEr.transpose() * NEr, iv);
  MatrixFunction K = add(mul(MatrixFunction::constant(NEr.transpose(), iv), cleaned), proj);
  const auto cert = min_singular_certificate(K);
  if (!cert.passed()) {
    std::ostringstream os;
    os << "build_K_row: K near singular (R blocks not uniformly nonsingular), "
       << "sigma_min=" << cert.min_sigma << " at t=" << cert.worst_t;
    throw NearSingularError(os.str(), cert.worst_t, cert.min_sigma);
  }
  return K;
}

RowPipelineTrace iterate_row(const SutMatrixFunction& N0,
                             const EquivalenceTransform& T0, double tol,
                             const PipelineOptions& opts) {
  const BlockSignature& sig = N0.sig;
  const int mu = sig.mu();
  const int m = sig.m();
  const Interval iv = N0.N.interval();
  const Eigen::MatrixXd NEr = elementary_row(sig);
  const MatrixFunction I = MatrixFunction::identity(m, iv);

  RowPipelineTrace trace;
  trace.sig = sig;
  trace.total = T0;

  MatrixFunction N = N0.N;
  trace.steps.push_back(RowStep{0, N, std::nullopt, std::nullopt, lambda_row(sig, 0),
                                leading_cols_residual(N, NEr, lambda_row(sig, 0), opts.grid)});

  for (int k = 0; k + 1 < mu; ++k) {
    // The lemma K satisfies N^(Er) K_lem = N^(k); the equivalence uses its
    // inverse as coordinate change so that N^(k) K = N^(Er).
    MatrixFunction K_lem = build_K_row(N, sig);
    MatrixFunction K =
        inverse_with_identity_prefix(K_lem, exact_identity_prefix(K_lem), tol);
    LemmaResult lem = lemma_inner(DaePair{N, I}, K, tol);
    const MatrixFunction H = add(I, mul(K_lem, mul(N, K.derivative())));
    trace.steps.back().K = K;
    trace.steps.back().H = H;

    N = lem.Ehat;
    trace.total = compose(trace.total, lem.T);

    const int lam = lambda_row(sig, k + 1);
    const double resid = leading_cols_residual(N, NEr, lam, opts.grid);
    trace.steps.push_back(RowStep{k + 1, N, std::nullopt, std::nullopt, lam, resid});
    if (resid > tol) {
      std::ostringstream os;
      os << "iterate_row: column-coincidence residual " << resid << " above "
         << tol << " at step " << (k + 1) << " (lambda=" << lam << ")";
      throw NonConvergenceError(os.str());
    }
    if (opts.early_exit &&
        grid_distance(N, MatrixFunction::constant(NEr, iv), opts.grid) <= tol) {
      break;
    }
  }
  return trace;
}

RowCanonResult canonicalize_row(const SutMatrixFunction& Nin, double tol,
                                const PipelineOptions& opts) {
  if (!is_sut_rows(Nin.N, Nin.sig, opts.predicate_tol, opts.grid)) {
    throw PredicateError(
        "canonicalize_row: input fails the SUT_rows predicate "
        "(strict upper block structure or full row rank of secondary blocks)");
  }
  auto [N0, T0] = step0_normalize_row(Nin, tol, opts);
  RowCanonResult res;
  res.trace = iterate_row(N0, T0, tol, opts);
  res.T = res.trace.total;
  res.Nr = elementary_row(Nin.sig);
  const Interval iv = Nin.N.interval();
  const int m = Nin.sig.m();
  res.report = verify(res.T,
                      DaePair{Nin.N, MatrixFunction::identity(m, iv)},
                      DaePair{MatrixFunction::constant(res.Nr, iv),
                              MatrixFunction::identity(m, iv)},
                      opts.grid, tol);
  return res;
}

}  // namespace sscf
