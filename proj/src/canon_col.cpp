#include "sscf/canon_col.hpp"

#include <sstream>

#include "sscf/util.hpp"

namespace sscf {

namespace {

// Structural projection used when constructing K: blocks on and below the
// block diagonal are exact zeros, and rows that already agree with the
// elementary target within snap_tol become its exact constant rows. K built
// from this copy has identically vanishing derivative in exactly the rows
// the iteration relies on, so interpolation noise is never differentiated
// there.
MatrixFunction snap_to_structure(const MatrixFunction& N, const BlockSignature& sig,
                                 const Eigen::MatrixXd& target, double snap_tol,
                                 int grid) {
  const int m = N.rows();
  const int deg = N.degree();
  const auto off = sig.offsets();
  const auto ts = chebyshev_grid(N.interval(), grid);
  Eigen::VectorXd row_dev = Eigen::VectorXd::Zero(m);
  for (const double t : ts) {
    const Eigen::MatrixXd diff = N.eval(t) - target;
    for (int r = 0; r < m; ++r)
      row_dev(r) = std::max(row_dev(r), diff.row(r).cwiseAbs().maxCoeff());
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
  for (int r = 0; r < m; ++r) {
    if (row_dev(r) > snap_tol) continue;
    for (int j = 0; j < m; ++j) {
      put(r, j, 0, target(r, j));
      for (int k = 1; k <= deg; ++k) put(r, j, k, 0.0);
    }
  }
  return MatrixFunction(m, m, N.interval(), deg, std::move(flat), N.fit_tol())
      .compressed(1e-15);
}

double bottom_rows_residual(const MatrixFunction& N, const Eigen::MatrixXd& target,
                            int rows_from_bottom, int grid) {
  if (rows_from_bottom <= 0) return 0.0;
  const int m = N.rows();
  const auto ts = chebyshev_grid(N.interval(), grid);
  double worst = 0.0;
  for (const double t : ts) {
    const Eigen::MatrixXd diff = N.eval(t) - target;
    worst = std::max(worst, max_abs(diff.bottomRows(rows_from_bottom)));
  }
  (void)m;
  return worst;
}

}  // namespace

int kappa_col(const BlockSignature& sig, int k) {
  int sum = 0;
  for (int i = 0; i < sig.mu() - (k + 1); ++i) sum += sig.ells[static_cast<size_t>(i)];
  return sig.m() - sum;
}

std::pair<SutMatrixFunction, EquivalenceTransform> step0_normalize(
    const SutMatrixFunction& Nin, double tol, const PipelineOptions& opts) {
  const BlockSignature& sig = Nin.sig;
  const auto off = sig.offsets();
  const int mu = sig.mu();
  const Interval iv = Nin.N.interval();
  const double svd_tol = std::max(tol * 1e-4, 1e-12);

  std::vector<MatrixFunction> diag;
  diag.reserve(static_cast<size_t>(mu));
  for (int i = 0; i + 1 < mu; ++i) {
    const MatrixFunction blk = Nin.N.block(off[static_cast<size_t>(i)], off[static_cast<size_t>(i + 1)],
                                           sig.ells[static_cast<size_t>(i)], sig.ells[static_cast<size_t>(i + 1)]);
    SvdTriple svd = smooth_svd(blk, svd_tol);
    diag.push_back(std::move(svd.U));
  }
  diag.push_back(MatrixFunction::identity(sig.ells[static_cast<size_t>(mu - 1)], iv));
  const MatrixFunction B_U = block_diag(diag);
  const MatrixFunction B_U_t = B_U.transpose();

  LemmaResult lem = lemma_triangular(Nin.N, B_U, tol, &B_U_t);
  MatrixFunction N0 = lem.Ehat;

  // Zero-row property of step 0: l_{mu-1} trailing rows vanish.
  const int zero_rows = sig.ells[static_cast<size_t>(mu - 2)];
  const double zr = bottom_rows_residual(
      N0, Eigen::MatrixXd::Zero(sig.m(), sig.m()), zero_rows, opts.grid);
  if (zr > tol) {
    std::ostringstream os;
    os << "step0_normalize: trailing " << zero_rows
       << " rows fail to vanish, residual " << zr;
    throw NonConvergenceError(os.str());
  }
  return {SutMatrixFunction{std::move(N0), sig, SutVariant::columns}, lem.T};
}

MatrixFunction build_K_col(const MatrixFunction& Nk, const BlockSignature& sig) {
  const Eigen::MatrixXd NEc = elementary_col(sig);
  const Interval iv = Nk.interval();
  const MatrixFunction cleaned =
      snap_to_structure(Nk, sig, NEc, 1e-7, defaults::verify_grid);
  const MatrixFunction proj = MatrixFunction::constant(
      Eigen::MatrixXd::Identity(sig.m(), sig.m()) - NEc * NEc.transpose(), iv);
  MatrixFunction K = add(mul(cleaned, MatrixFunction::constant(NEc.transpose(), iv)), proj);
  const auto cert = min_singular_certificate(K);
  if (!cert.passed()) {
    std::ostringstream os;
    os << "build_K_col: K near singular (R blocks not uniformly nonsingular), "
       << "sigma_min=" << cert.min_sigma << " at t=" << cert.worst_t;
    throw NearSingularError(os.str(), cert.worst_t, cert.min_sigma);
  }
  return K;
}

ColPipelineTrace iterate_col(const SutMatrixFunction& N0,
                             const EquivalenceTransform& T0, double tol,
                             const PipelineOptions& opts) {
  const BlockSignature& sig = N0.sig;
  const int mu = sig.mu();
  const int m = sig.m();
  const Interval iv = N0.N.interval();
  const Eigen::MatrixXd NEc = elementary_col(sig);
  const MatrixFunction I = MatrixFunction::identity(m, iv);

  ColPipelineTrace trace;
  trace.sig = sig;
  trace.total = T0;

  MatrixFunction N = N0.N;
  trace.steps.push_back(ColStep{0, N, std::nullopt, std::nullopt, kappa_col(sig, 0),
                                bottom_rows_residual(N, NEc, kappa_col(sig, 0), opts.grid)});

  for (int k = 0; k + 1 < mu; ++k) {
    MatrixFunction K = build_K_col(N, sig);
    LemmaResult lem = lemma_inner(DaePair{N, I}, K, tol);
    const MatrixFunction Kinv = inverse(K, tol);
    const MatrixFunction H = add(I, mul(Kinv, mul(N, K.derivative())));
    trace.steps.back().K = K;
    trace.steps.back().H = H;

    N = lem.Ehat;
    trace.total = compose(trace.total, lem.T);

    const int kap = kappa_col(sig, k + 1);
    const double resid = bottom_rows_residual(N, NEc, kap, opts.grid);
    trace.steps.push_back(ColStep{k + 1, N, std::nullopt, std::nullopt, kap, resid});
    if (resid > tol) {
      std::ostringstream os;
      os << "iterate_col: row-coincidence residual " << resid << " above " << tol
         << " at step " << (k + 1) << " (kappa=" << kap << ")";
      throw NonConvergenceError(os.str());
    }
    if (opts.early_exit &&
        grid_distance(N, MatrixFunction::constant(NEc, iv), opts.grid) <= tol) {
      break;
    }
  }
  return trace;
}

ColCanonResult canonicalize_col(const SutMatrixFunction& Nin, double tol,
                                const PipelineOptions& opts) {
  if (!is_sut_columns(Nin.N, Nin.sig, opts.predicate_tol, opts.grid)) {
    throw PredicateError(
        "canonicalize_col: input fails the SUT_columns predicate "
        "(strict upper block structure or full column rank of secondary blocks)");
  }
  auto [N0, T0] = step0_normalize(Nin, tol, opts);
  ColCanonResult res;
  res.trace = iterate_col(N0, T0, tol, opts);
  res.T = res.trace.total;
  res.Nc = elementary_col(Nin.sig);
  const Interval iv = Nin.N.interval();
  const int m = Nin.sig.m();
  res.report = verify(res.T,
                      DaePair{Nin.N, MatrixFunction::identity(m, iv)},
                      DaePair{MatrixFunction::constant(res.Nc, iv),
                              MatrixFunction::identity(m, iv)},
                      opts.grid, tol);
  return res;
}

}  // namespace sscf
