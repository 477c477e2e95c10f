#include "sscf/svd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "sscf/parallel.hpp"
#include "sscf/util.hpp"

namespace sscf {

namespace detail {

std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionError("hungarian_min: square cost required");
  if (n == 0) return {};
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, INF);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = p[static_cast<size_t>(j0)];
      int j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<size_t>(j)] > 0) result[static_cast<size_t>(p[static_cast<size_t>(j)]) - 1] = j - 1;
  return result;
}

Eigen::MatrixXd polar_orthogonal(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

namespace {

struct NodeSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd V;
  int rank = 0;
};

void canonical_signs(NodeSvd& f, int rank) {
  const int rows = static_cast<int>(f.U.rows());
  const int cols = static_cast<int>(f.V.rows());
  for (int i = 0; i < rank; ++i) {
    int mi = 0;
    f.U.col(i).cwiseAbs().maxCoeff(&mi);
    if (f.U(mi, i) < 0) {
      f.U.col(i) *= -1.0;
      f.V.col(i) *= -1.0;
    }
  }
  for (int i = rank; i < rows; ++i) {
    int mi = 0;
    f.U.col(i).cwiseAbs().maxCoeff(&mi);
    if (f.U(mi, i) < 0) f.U.col(i) *= -1.0;
  }
  for (int i = rank; i < cols; ++i) {
    int mi = 0;
    f.V.col(i).cwiseAbs().maxCoeff(&mi);
    if (f.V(mi, i) < 0) f.V.col(i) *= -1.0;
  }
}

// Aligns cur to prev in place.
void align_to_previous(const NodeSvd& prev, NodeSvd& cur, int rank) {
  const int rows = static_cast<int>(cur.U.rows());
  const int cols = static_cast<int>(cur.V.rows());

  if (rank > 0) {
    Eigen::MatrixXd overlap_u = prev.U.leftCols(rank).transpose() * cur.U.leftCols(rank);
    Eigen::MatrixXd overlap_v = prev.V.leftCols(rank).transpose() * cur.V.leftCols(rank);
    Eigen::MatrixXd gain = overlap_u.cwiseAbs() + overlap_v.cwiseAbs();
    const auto perm = detail::hungarian_min((-gain).eval());

    Eigen::MatrixXd Up = cur.U.leftCols(rank), Vp = cur.V.leftCols(rank);
    Eigen::VectorXd sp(rank);
    for (int i = 0; i < rank; ++i) {
      Up.col(i) = cur.U.col(perm[static_cast<size_t>(i)]);
      Vp.col(i) = cur.V.col(perm[static_cast<size_t>(i)]);
      sp(i) = cur.s(perm[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < rank; ++i) {
      const double d = prev.U.col(i).dot(Up.col(i)) + prev.V.col(i).dot(Vp.col(i));
      if (d < 0) {
        Up.col(i) *= -1.0;
        Vp.col(i) *= -1.0;
      }
    }
    cur.U.leftCols(rank) = Up;
    cur.V.leftCols(rank) = Vp;
    for (int i = 0; i < rank; ++i) cur.s(i) = sp(i);
  }
  // Orthogonal-complement blocks rotate freely; keep them as close to the
  // previous node as possible.
  if (rows > rank) {
    auto Q = cur.U.rightCols(rows - rank);
    const Eigen::MatrixXd omega =
        detail::polar_orthogonal(Q.transpose() * prev.U.rightCols(rows - rank));
    cur.U.rightCols(rows - rank) = Q * omega;
  }
  if (cols > rank) {
    auto Q = cur.V.rightCols(cols - rank);
    const Eigen::MatrixXd omega =
        detail::polar_orthogonal(Q.transpose() * prev.V.rightCols(cols - rank));
    cur.V.rightCols(cols - rank) = Q * omega;
  }
}

// Groups of (near-)equal singular values among the leading `rank` entries;
// only groups of size >= 2 are returned.
std::vector<std::vector<int>> sigma_clusters(const Eigen::VectorXd& s, int rank,
                                             double ctol) {
  std::vector<int> parent(static_cast<size_t>(rank));
  for (int i = 0; i < rank; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  for (int a = 0; a < rank; ++a)
    for (int b = a + 1; b < rank; ++b)
      if (std::abs(s(a) - s(b)) <= ctol) parent[static_cast<size_t>(find(b))] = find(a);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < rank; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups)
    if (members.size() >= 2) out.push_back(std::move(members));
  return out;
}

// A node whose leading singular values contain a machine-level cluster gets
// an arbitrarily mixed basis from the pointwise SVD; such nodes are skipped
// as alignment references and repaired afterwards from a clean neighbor by a
// joint rotation of the clustered columns (exact up to the cluster spread).
void repair_degenerate_node(NodeSvd& bad, const NodeSvd& ref, double ctol) {
  for (const auto& cluster : sigma_clusters(bad.s, bad.rank, ctol)) {
    const int c = static_cast<int>(cluster.size());
    Eigen::MatrixXd Ub(bad.U.rows(), c), Ur(bad.U.rows(), c);
    Eigen::MatrixXd Vb(bad.V.rows(), c), Vr(bad.V.rows(), c);
    for (int i = 0; i < c; ++i) {
      Ub.col(i) = bad.U.col(cluster[static_cast<size_t>(i)]);
      Ur.col(i) = ref.U.col(cluster[static_cast<size_t>(i)]);
      Vb.col(i) = bad.V.col(cluster[static_cast<size_t>(i)]);
      Vr.col(i) = ref.V.col(cluster[static_cast<size_t>(i)]);
    }
    const Eigen::MatrixXd omega =
        detail::polar_orthogonal(Ub.transpose() * Ur + Vb.transpose() * Vr);
    Ub *= omega;
    Vb *= omega;
    for (int i = 0; i < c; ++i) {
      bad.U.col(cluster[static_cast<size_t>(i)]) = Ub.col(i);
      bad.V.col(cluster[static_cast<size_t>(i)]) = Vb.col(i);
    }
  }
}

}  // namespace

SvdTriple smooth_svd(const MatrixFunction& M, double tol, const SvdOptions& opts) {
  const int rows = M.rows();
  const int cols = M.cols();
  const int k = std::min(rows, cols);
  const Interval iv = M.interval();
  const double mscale = std::max(1.0, M.max_abs_coeff());

  int n = std::max(opts.initial_degree, 2);
  while (n < 2 * M.degree() && n < 128) n *= 2;

  for (;; n *= 2) {
    if (n > opts.max_degree) {
      throw NonConvergenceError("smooth_svd: degree cap exceeded");
    }
    const auto ts = chebyshev_grid(iv, n + 1);
    std::vector<NodeSvd> fac(ts.size());
    par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.eval(ts[static_cast<size_t>(j)]),
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      auto& f = fac[static_cast<size_t>(j)];
      f.U = svd.matrixU();
      f.V = svd.matrixV();
      f.s = svd.singularValues();
      f.rank = 0;
      for (int i = 0; i < k; ++i)
        if (f.s(i) > opts.rank_gap_tol) ++f.rank;
    });

    const int rank = fac[0].rank;
    for (size_t j = 0; j < fac.size(); ++j) {
      if (fac[j].rank != rank) {
        std::ostringstream os;
        os << "smooth_svd: constant-rank violation, rank " << rank << " at t="
           << ts[0] << " vs rank " << fac[j].rank << " at t=" << ts[j];
        throw RankChangeError(os.str());
      }
      if (fac[j].rank < k) {
        const double gap = (fac[j].rank == 0 ? 0.0 : fac[j].s(fac[j].rank - 1)) - fac[j].s(fac[j].rank);
        if (fac[j].rank > 0 && gap <= opts.rank_gap_tol) {
          std::ostringstream os;
          os << "smooth_svd: ambiguous rank gap " << gap << " at t=" << ts[j];
          throw RankChangeError(os.str());
        }
      }
    }

    double sigma_scale = 0.0;
    for (const auto& f : fac)
      if (f.s.size() > 0) sigma_scale = std::max(sigma_scale, f.s(0));
    const double ctol = 1e-11 * std::max(1.0, sigma_scale);
    std::vector<char> degen(fac.size(), 0);
    for (size_t j = 0; j < fac.size(); ++j)
      degen[j] = sigma_clusters(fac[j].s, rank, ctol).empty() ? 0 : 1;

    canonical_signs(fac[0], rank);
    size_t ref = 0;
    for (size_t j = 1; j < fac.size(); ++j) {
      align_to_previous(fac[ref], fac[j], rank);
      if (!degen[j]) ref = j;
    }
    for (size_t j = 0; j < fac.size(); ++j) {
      if (!degen[j]) continue;
      for (size_t d = 1; d < fac.size(); ++d) {
        if (j >= d && !degen[j - d]) {
          repair_degenerate_node(fac[j], fac[j - d], ctol);
          break;
        }
        if (j + d < fac.size() && !degen[j + d]) {
          repair_degenerate_node(fac[j], fac[j + d], ctol);
          break;
        }
      }
    }
    double max_jump = 0.0;
    for (size_t j = 1; j < fac.size(); ++j) {
      max_jump = std::max(max_jump,
                          std::max(max_abs(fac[j].U - fac[j - 1].U),
                                   max_abs(fac[j].V - fac[j - 1].V)));
    }
    if (max_jump > 0.9) {
      if (2 * n > opts.max_degree) {
        std::ostringstream os;
        os << "smooth_svd: alignment failure, consecutive-node jump " << max_jump;
        throw AlignmentError(os.str());
      }
      continue;
    }

    std::vector<Eigen::MatrixXd> uvals(ts.size()), svals(ts.size()), vvals(ts.size());
    for (size_t j = 0; j < ts.size(); ++j) {
      uvals[j] = fac[j].U;
      vvals[j] = fac[j].V;
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols);
      for (int i = 0; i < rank; ++i) s(i, i) = fac[j].s(i);
      svals[j] = s;
    }
    const double ftol = std::max(1e-2 * tol, 1e-13);
    SvdTriple out;
    out.U = interpolate_through(uvals, iv, ftol).compressed(0.1 * ftol);
    out.S = interpolate_through(svals, iv, ftol).compressed(0.1 * ftol);
    out.V = interpolate_through(vvals, iv, ftol).compressed(0.1 * ftol);
    out.rank = rank;

    // Verify orthogonality and reconstruction between the fitting nodes.
    const int vg = std::min(2 * n + 1, 257);
    const auto vt = chebyshev_grid(iv, vg);
    std::vector<double> errs(vt.size());
    const Eigen::MatrixXd Iu = Eigen::MatrixXd::Identity(rows, rows);
    const Eigen::MatrixXd Ivv = Eigen::MatrixXd::Identity(cols, cols);
    par::for_index(static_cast<std::ptrdiff_t>(vt.size()), [&](std::ptrdiff_t j) {
      const double t = vt[static_cast<size_t>(j)];
      const Eigen::MatrixXd u = out.U.eval(t);
      const Eigen::MatrixXd s = out.S.eval(t);
      const Eigen::MatrixXd v = out.V.eval(t);
      double e = max_abs(u.transpose() * u - Iu);
      e = std::max(e, max_abs(v.transpose() * v - Ivv));
      e = std::max(e, max_abs(u * s * v.transpose() - M.eval(t)) / mscale);
      errs[static_cast<size_t>(j)] = e;
    });
    double err = 0.0;
    for (double e : errs) err = std::max(err, e);
    if (err <= tol) return out;
  }
}

}  // namespace sscf
