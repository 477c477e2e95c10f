#include "sscf/equivalence.hpp"

#include <sstream>

#include "sscf/parallel.hpp"
#include "sscf/util.hpp"

namespace sscf {

EquivalenceTransform make_transform(MatrixFunction L, MatrixFunction K,
                                    int cert_grid, double threshold) {
  MatrixFunction Kd = K.derivative();
  return make_transform_with_derivative(std::move(L), std::move(K), std::move(Kd),
                                        cert_grid, threshold);
}

EquivalenceTransform make_transform_with_derivative(MatrixFunction L, MatrixFunction K,
                                                    MatrixFunction Kd, int cert_grid,
                                                    double threshold) {
  if (!L.is_square() || !K.is_square() || L.rows() != K.rows())
    throw DimensionError("make_transform: L and K must be square of equal size");
  if (!(L.interval() == K.interval()))
    throw DimensionError("make_transform: interval mismatch");
  EquivalenceTransform T{std::move(L), std::move(K), std::move(Kd), {}, {}};
  T.cert_L = min_singular_certificate(T.L, cert_grid);
  T.cert_K = min_singular_certificate(T.K, cert_grid);
  for (const auto* c : {&T.cert_L, &T.cert_K}) {
    if (!c->passed(threshold)) {
      std::ostringstream os;
      os << "make_transform: certificate failure, sigma_min=" << c->min_sigma
         << " at t=" << c->worst_t;
      throw NearSingularError(os.str(), c->worst_t, c->min_sigma);
    }
  }
  return T;
}

EquivalenceTransform identity_transform(int m, Interval iv) {
  return make_transform(MatrixFunction::identity(m, iv),
                        MatrixFunction::identity(m, iv));
}

DaePair apply(const EquivalenceTransform& T, const DaePair& p) {
  const MatrixFunction LE = mul(T.L, p.E);
  const MatrixFunction Et = mul(LE, T.K);
  const MatrixFunction Ft = add(mul(mul(T.L, p.F), T.K), mul(LE, T.Kd));
  return DaePair{Et, Ft};
}

EquivalenceTransform compose(const EquivalenceTransform& T1,
                             const EquivalenceTransform& T2) {
  MatrixFunction Kd = add(mul(T1.Kd, T2.K), mul(T1.K, T2.Kd));
  return make_transform_with_derivative(mul(T2.L, T1.L), mul(T1.K, T2.K),
                                        std::move(Kd));
}

EquivalenceTransform inverse_transform(const EquivalenceTransform& T, double tol) {
  MatrixFunction Kinv = inverse(T.K, tol);
  MatrixFunction Kd = scale(mul(Kinv, mul(T.Kd, Kinv)), -1.0);
  return make_transform_with_derivative(inverse(T.L, tol), std::move(Kinv),
                                        std::move(Kd));
}

VerifyReport verify(const EquivalenceTransform& T, const DaePair& p,
                    const DaePair& pt, int grid, double tol) {
  VerifyReport rep;
  rep.tol = tol;
  rep.grid = grid;
  const auto ts = chebyshev_grid(p.E.interval(), grid);
  const MatrixFunction& Kd = T.Kd;
  struct Node {
    double re, rf;
  };
  std::vector<Node> nodes(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
    const double t = ts[static_cast<size_t>(j)];
    const Eigen::MatrixXd l = T.L.eval(t), k = T.K.eval(t), kd = Kd.eval(t);
    const Eigen::MatrixXd e = p.E.eval(t), f = p.F.eval(t);
    const Eigen::MatrixXd le = l * e;
    nodes[static_cast<size_t>(j)].re = inf_norm(le * k - pt.E.eval(t));
    nodes[static_cast<size_t>(j)].rf = inf_norm(l * f * k + le * kd - pt.F.eval(t));
  });
  for (size_t j = 0; j < nodes.size(); ++j) {
    const double worst = std::max(nodes[j].re, nodes[j].rf);
    if (worst > std::max(rep.residual_E, rep.residual_F)) rep.worst_t = ts[j];
    rep.residual_E = std::max(rep.residual_E, nodes[j].re);
    rep.residual_F = std::max(rep.residual_F, nodes[j].rf);
  }
  rep.pass = rep.residual_E <= tol && rep.residual_F <= tol;
  return rep;
}

LemmaResult lemma_inner(const DaePair& p, const MatrixFunction& K, double tol) {
  MatrixFunction Kd = K.derivative();
  const MatrixFunction G = add(mul(p.F, K), mul(p.E, Kd));
  MatrixFunction L = [&] {
    try {
      return inverse(G, tol);
    } catch (const NearSingularError& e) {
      std::ostringstream os;
      os << "lemma_inner: G = FK + EK' is near singular, sigma_min="
         << e.min_sigma << " at t=" << e.worst_t;
      throw NearSingularError(os.str(), e.worst_t, e.min_sigma);
    }
  }();
  LemmaResult res;
  res.Ehat = mul(mul(L, p.E), K);
  res.T = make_transform_with_derivative(std::move(L), K, std::move(Kd));
  return res;
}

namespace {

// Strictly block-triangular within tol (any triangle): sup of the diagonal
// plus one full triangle vanishes.
bool strictly_triangular_on_grid(const MatrixFunction& X, double tol, int grid) {
  const auto ts = chebyshev_grid(X.interval(), grid);
  double lower = 0.0, upper = 0.0, diag = 0.0;
  for (const double t : ts) {
    const Eigen::MatrixXd v = X.eval(t);
    for (int i = 0; i < v.rows(); ++i) {
      diag = std::max(diag, std::abs(v(i, i)));
      for (int j = 0; j < i; ++j) lower = std::max(lower, std::abs(v(i, j)));
      for (int j = i + 1; j < v.cols(); ++j) upper = std::max(upper, std::abs(v(i, j)));
    }
  }
  if (diag > tol) return false;
  return lower <= tol || upper <= tol;
}

}  // namespace

LemmaResult lemma_triangular(const MatrixFunction& E, const MatrixFunction& K,
                             double tol, const MatrixFunction* K_inverse_hint) {
  const MatrixFunction Kd = K.derivative();
  const MatrixFunction G = add(K, mul(E, Kd));  // G = K H, H = I + K^{-1} E K'
  const MatrixFunction Kinv =
      K_inverse_hint != nullptr ? *K_inverse_hint : inverse(K, tol);
  const MatrixFunction X = mul(Kinv, mul(E, Kd));
  LemmaResult res;
  res.triangular_structure = strictly_triangular_on_grid(X, 1e-8, defaults::verify_grid);
  const auto certH = min_singular_certificate(
      add(MatrixFunction::identity(E.rows(), E.interval()), X));
  if (!certH.passed()) {
    std::ostringstream os;
    os << "lemma_triangular: H = I + K^{-1} E K' near singular, sigma_min="
       << certH.min_sigma << " at t=" << certH.worst_t;
    throw NearSingularError(os.str(), certH.worst_t, certH.min_sigma);
  }
  MatrixFunction L = inverse(G, tol);
  res.Ehat = mul(mul(L, E), K);
  res.T = make_transform_with_derivative(std::move(L), K, Kd);
  return res;
}

}  // namespace sscf
