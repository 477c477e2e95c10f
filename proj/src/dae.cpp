#include "sscf/dae.hpp"

#include <cmath>
#include <sstream>

#include "sscf/parallel.hpp"
#include "sscf/util.hpp"

namespace sscf {

int nilpotency_index(const Eigen::MatrixXd& N) {
  const auto ranks = ranks_of_powers(N);
  if (ranks.back() != 0)
    throw CharacteristicsError("nilpotency_index: matrix is not nilpotent");
  return static_cast<int>(ranks.size());
}

ScfPair assemble(const MatrixFunction& Omega, const MatrixFunction& N) {
  if (!Omega.is_square() || !N.is_square())
    throw DimensionError("assemble: blocks must be square");
  if (!(Omega.interval() == N.interval()))
    throw DimensionError("assemble: interval mismatch");
  ScfPair p;
  p.d = Omega.rows();
  p.Omega = Omega;
  p.N = N;
  p.is_sscf = N.is_constant() &&
              ranks_of_powers(N.eval(N.interval().mid())).back() == 0;
  return p;
}

ScfPair assemble_nilpotent(const MatrixFunction& N) {
  if (!N.is_square()) throw DimensionError("assemble_nilpotent: square N required");
  ScfPair p;
  p.d = 0;
  p.Omega = MatrixFunction::zero(1, 1, N.interval());  // unused sentinel
  p.N = N;
  p.is_sscf = N.is_constant() &&
              ranks_of_powers(N.eval(N.interval().mid())).back() == 0;
  return p;
}

DaePair to_dae_pair(const ScfPair& p) {
  const Interval iv = p.N.interval();
  const int md = p.N.rows();
  if (p.d == 0) {
    return DaePair{p.N, MatrixFunction::identity(md, iv)};
  }
  const MatrixFunction Id = MatrixFunction::identity(p.d, iv);
  const MatrixFunction Imd = MatrixFunction::identity(md, iv);
  return DaePair{block_diag({Id, p.N}), block_diag({p.Omega, Imd})};
}

namespace {

EquivalenceTransform lift_transform(const EquivalenceTransform& T, int d, Interval iv) {
  if (d == 0) return T;
  const MatrixFunction Id = MatrixFunction::identity(d, iv);
  return make_transform_with_derivative(
      block_diag({Id, T.L}), block_diag({Id, T.K}),
      block_diag({MatrixFunction::zero(d, d, iv), T.Kd}));
}

}  // namespace

PairCanonResult canonicalize_pair(const ScfPair& p, const BlockSignature& sig,
                                  SutVariant variant, double tol,
                                  const PipelineOptions& opts) {
  const Interval iv = p.N.interval();
  PairCanonResult res;
  if (p.is_sscf) {
    res.T = identity_transform(p.m(), iv);
    res.sscf = p;
    res.report = verify(res.T, to_dae_pair(p), to_dae_pair(p), opts.grid, tol);
    return res;
  }
  SutMatrixFunction sut{p.N, sig, variant};
  Eigen::MatrixXd target;
  EquivalenceTransform Tn = identity_transform(p.N.rows(), iv);
  if (variant == SutVariant::columns) {
    auto r = canonicalize_col(sut, tol, opts);
    target = r.Nc;
    Tn = r.T;
  } else if (variant == SutVariant::rows) {
    auto r = canonicalize_row(sut, tol, opts);
    target = r.Nr;
    Tn = r.T;
  } else {
    throw SignatureError("canonicalize_pair: variant must be columns or rows");
  }
  res.T = lift_transform(Tn, p.d, iv);
  ScfPair out = p;
  out.N = MatrixFunction::constant(target, iv);
  out.is_sscf = true;
  res.sscf = out;
  res.report = verify(res.T, to_dae_pair(p), to_dae_pair(out), opts.grid, tol);
  return res;
}

JordanResult to_jordan(const ScfPair& sscf) {
  if (!sscf.is_sscf)
    throw PredicateError("to_jordan: input is not in strong form (constant N)");
  const Interval iv = sscf.N.interval();
  const Eigen::MatrixXd N = sscf.N.eval(iv.mid());
  const int mn = static_cast<int>(N.rows());

  std::vector<int> perm;
  if (max_abs(N) <= 1e-12) {
    perm.resize(static_cast<size_t>(mn));
    for (int i = 0; i < mn; ++i) perm[static_cast<size_t>(i)] = i;
  } else {
    const int rank_n = numerical_rank(N);
    const Characteristics c = characteristics_from_nilpotent(N, rank_n, 0);
    bool found = false;
    for (const SutVariant variant : {SutVariant::columns, SutVariant::rows}) {
      const BlockSignature sig = signature_from_characteristics(c, mn, variant);
      const Eigen::MatrixXd elem = variant == SutVariant::columns
                                       ? elementary_col(sig)
                                       : elementary_row(sig);
      if (max_abs(N - elem) <= 1e-9) {
        perm = jordan_permutation(sig, variant);
        found = true;
        break;
      }
    }
    if (!found)
      throw PredicateError("to_jordan: constant N is not an elementary matrix");
  }

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(mn, mn);
  for (int a = 0; a < mn; ++a) P(a, perm[static_cast<size_t>(a)]) = 1.0;

  JordanResult res;
  res.pair = sscf;
  res.pair.N = MatrixFunction::constant(permute_similarity(perm, N), iv);
  const MatrixFunction Pmf = MatrixFunction::constant(P, iv);
  EquivalenceTransform Tn = make_transform(Pmf, Pmf.transpose());
  res.T = lift_transform(Tn, sscf.d, iv);
  return res;
}

namespace {

// Dormand-Prince 5(4) with PI step control; records the solution at the
// requested output points (assumed increasing, starting at t0).
std::vector<Eigen::VectorXd> dopri5(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& y0, const std::vector<double>& out_ts, double rtol,
    double atol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<Eigen::VectorXd> out;
  out.reserve(out_ts.size());
  double t = out_ts.front();
  Eigen::VectorXd y = y0;
  out.push_back(y);

  Eigen::VectorXd k1 = f(t, y);
  double h = (out_ts.back() - out_ts.front()) / 100.0;
  const double hmin = 1e-14 * (out_ts.back() - out_ts.front());

  for (size_t target = 1; target < out_ts.size(); ++target) {
    const double t_end = out_ts[target];
    while (t < t_end) {
      h = std::min(h, t_end - t);
      const Eigen::VectorXd k2 = f(t + c2 * h, y + h * (a21 * k1));
      const Eigen::VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Eigen::VectorXd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXd k5 =
          f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXd k6 =
          f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXd ynew =
          y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Eigen::VectorXd k7 = f(t + h, ynew);
      const Eigen::VectorXd err_v =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        err += std::pow(err_v(i) / sc, 2);
      }
      err = std::sqrt(err / std::max<int>(1, static_cast<int>(y.size())));

      if (err <= 1.0) {
        t += h;
        y = ynew;
        k1 = k7;  // FSAL
      }
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
      h = std::max(h * fac, hmin);
      if (h <= hmin && err > 1.0)
        throw NonConvergenceError("dopri5: step size underflow");
    }
    out.push_back(y);
    t = t_end;
  }
  return out;
}

}  // namespace

SolveResult solve_sscf(const ScfPair& sscf, const MatrixFunction& q,
                       const Eigen::VectorXd& x0_dyn, double tol,
                       const SolveOptions& opts) {
  if (!sscf.is_sscf)
    throw PredicateError("solve_sscf: pair is not in strong form");
  const Interval iv = sscf.N.interval();
  const int m = sscf.m();
  const int d = sscf.d;
  if (q.rows() != m || q.cols() != 1)
    throw DimensionError("solve_sscf: q must be m x 1");
  if (x0_dyn.size() != d)
    throw DimensionError("solve_sscf: x0_dyn must have d entries");

  // Algebraic/nilpotent part: x2 = sum_k (-1)^k N^k q2^(k).
  const Eigen::MatrixXd N = sscf.N.eval(iv.mid());
  const int mu = max_abs(N) <= 1e-14 ? 1 : nilpotency_index(N);
  const MatrixFunction q2 = q.block(d, 0, m - d, 1);
  const MatrixFunction Nmf = MatrixFunction::constant(N, iv);
  MatrixFunction x2 = q2;
  MatrixFunction cur = q2;
  double sign = -1.0;
  for (int k = 1; k < mu; ++k) {
    cur = mul(Nmf, cur.derivative());
    x2 = add(x2, scale(cur, sign));
    sign = -sign;
  }

  MatrixFunction x = x2;
  if (d > 0) {
    const MatrixFunction q1 = q.block(0, 0, d, 1);
    const auto f = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return q1.eval(t).col(0) - sscf.Omega.eval(t) * y;
    };
    int n = 32;
    MatrixFunction x1;
    for (;; n *= 2) {
      if (n > defaults::degree_cap)
        throw NonConvergenceError("solve_sscf: dynamic part interpolant did not converge");
      const auto ts = chebyshev_grid(iv, n + 1);
      const auto ys = dopri5(f, x0_dyn, ts, opts.rk_tol, opts.rk_tol);
      std::vector<Eigen::MatrixXd> vals(ys.size());
      for (size_t j = 0; j < ys.size(); ++j) vals[j] = ys[j];
      x1 = interpolate_through(vals, iv, tol).compressed(1e-14);
      // ODE residual between nodes decides whether the interpolant is fine
      // enough.
      const MatrixFunction x1d = x1.derivative();
      const auto vt = chebyshev_grid(iv, 2 * n + 1);
      double worst = 0.0;
      for (const double t : vt) {
        const Eigen::VectorXd r =
            x1d.eval(t).col(0) + sscf.Omega.eval(t) * x1.eval(t).col(0) - q1.eval(t).col(0);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
      if (worst <= 10.0 * tol) break;
    }
    x = vstack({x1, x2});
  }

  SolveResult res;
  res.x = x;
  res.free_initial_dimension = d;
  res.residual_norm = residual(to_dae_pair(sscf), x, q, opts.grid);
  if (res.residual_norm > 100.0 * tol) {
    std::ostringstream os;
    os << "solve_sscf: residual " << res.residual_norm << " above " << 100.0 * tol;
    throw SolveError(os.str(), res.residual_norm);
  }
  return res;
}

double residual(const DaePair& p, const MatrixFunction& x,
                const MatrixFunction& q, int grid) {
  if (x.cols() != 1 || q.cols() != 1 || x.rows() != p.E.rows() || q.rows() != p.E.rows())
    throw DimensionError("residual: dimension mismatch");
  const MatrixFunction xd = x.derivative();
  const auto ts = chebyshev_grid(p.E.interval(), grid);
  std::vector<double> r(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
    const double t = ts[static_cast<size_t>(j)];
    const Eigen::VectorXd v = p.E.eval(t) * xd.eval(t).col(0) +
                              p.F.eval(t) * x.eval(t).col(0) - q.eval(t).col(0);
    r[static_cast<size_t>(j)] = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  });
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, v);
  return worst;
}

std::pair<MatrixFunction, MatrixFunction> pull_back(const EquivalenceTransform& T,
                                                    const MatrixFunction& x_t,
                                                    const MatrixFunction& q_t,
                                                    double tol) {
  return {mul(T.K, x_t), mul(inverse(T.L, tol), q_t)};
}

}  // namespace sscf
