#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sscf/genbench.hpp"
#include "sscf/svd.hpp"

using namespace sscf;

namespace {

double svd_residuals(const SvdTriple& f, const MatrixFunction& M, int grid = 129) {
  double worst = 0.0;
  const Eigen::MatrixXd Iu = Eigen::MatrixXd::Identity(M.rows(), M.rows());
  const Eigen::MatrixXd Iv = Eigen::MatrixXd::Identity(M.cols(), M.cols());
  for (const double t : chebyshev_grid(M.interval(), grid)) {
    const Eigen::MatrixXd u = f.U.eval(t), s = f.S.eval(t), v = f.V.eval(t);
    worst = std::max(worst, (u.transpose() * u - Iu).cwiseAbs().maxCoeff());
    worst = std::max(worst, (v.transpose() * v - Iv).cwiseAbs().maxCoeff());
    worst = std::max(worst, (u * s * v.transpose() - M.eval(t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double max_step_jump(const MatrixFunction& F, int grid = 257) {
  const auto ts = chebyshev_grid(F.interval(), grid);
  double worst = 0.0;
  for (size_t j = 1; j < ts.size(); ++j) {
    worst = std::max(worst, (F.eval(ts[j]) - F.eval(ts[j - 1])).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_SUITE("svd") {

TEST_CASE("hungarian assignment matches brute force") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SplitMix64 rng = SplitMix64::stream(seed, 11);
    const int n = rng.uniform_int(1, 6);
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform(-2.0, 2.0);
    const auto assign = detail::hungarian_min(cost);
    double got = 0.0;
    std::vector<char> used(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      REQUIRE(assign[static_cast<size_t>(i)] >= 0);
      CHECK(!used[static_cast<size_t>(assign[static_cast<size_t>(i)])]);
      used[static_cast<size_t>(assign[static_cast<size_t>(i)])] = 1;
      got += cost(i, assign[static_cast<size_t>(i)]);
    }
    CHECK(got == doctest::Approx(oracles::brute_force_assignment(cost)).epsilon(1e-12));
  }
}

TEST_CASE("identity has the trivial smooth SVD after sign fixing") {
  const Interval iv(-1, 1);
  const auto f = smooth_svd(MatrixFunction::identity(3, iv), 1e-10);
  CHECK(f.rank == 3);
  CHECK(grid_distance(f.U, MatrixFunction::identity(3, iv)) <= 1e-10);
  CHECK(grid_distance(f.S, MatrixFunction::identity(3, iv)) <= 1e-10);
  CHECK(grid_distance(f.V, MatrixFunction::identity(3, iv)) <= 1e-10);
}

TEST_CASE("tall full-column-rank block keeps the singular value on top") {
  const Interval iv(-1, 1);
  const auto M = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m(2, 1);
        m << 2 + t, 0.0;
        return m;
      },
      iv, 1e-12);
  const auto f = smooth_svd(M, 1e-10);
  CHECK(f.rank == 1);
  for (const double t : {-0.9, 0.0, 0.8}) {
    CHECK(f.S.eval(t)(0, 0) == doctest::Approx(2 + t).epsilon(1e-9));
    CHECK(std::abs(f.U.eval(t)(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(f.U.eval(t)(1, 0)) <= 1e-9);
  }
  CHECK(f.U.eval(0.0)(0, 0) > 0);  // canonical sign
}

TEST_CASE("factors stay continuous through a singular value crossing") {
  const Interval iv(-1, 1);
  const auto M = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 0) = 2 + t;
        m(1, 1) = 2 - t;
        return m;
      },
      iv, 1e-12);
  const auto f = smooth_svd(M, 1e-9);
  CHECK(svd_residuals(f, M) <= 1e-9);
  // Smooth branches swap the sorted order at t = 0; continuity shows up as
  // small node-to-node jumps and small fitted degrees.
  CHECK(max_step_jump(f.U) <= 0.1);
  CHECK(max_step_jump(f.V) <= 0.1);
  const double s00_left = f.S.eval(-0.5)(0, 0);
  const double s00_right = f.S.eval(0.5)(0, 0);
  CHECK(s00_left == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(s00_right == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("rotated smooth factors verify orthogonality and reconstruction") {
  const Interval iv(-1, 1);
  const auto M = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd q(2, 2);
        const double a = 0.4 * t + 0.3;
        q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 0) = 2 + t;
        d(1, 1) = 0.5;
        const double b = -0.3 * t;
        Eigen::MatrixXd q2(2, 2);
        q2 << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
        return (q * d * q2).eval();
      },
      iv, 1e-12);
  const auto f = smooth_svd(M, 1e-9);
  CHECK(f.rank == 2);
  CHECK(svd_residuals(f, M) <= 1e-9);
  CHECK(max_step_jump(f.U) <= 0.1);
}

TEST_CASE("rotated crossing with the degeneracy exactly on a grid node") {
  // Singular values 2+t and 2-t cross at t = 0, which is a Chebyshev node
  // for every even node count; the rotated factors make the pointwise basis
  // at that node arbitrary, so it has to be repaired from its neighbors.
  const Interval iv(-1, 1);
  const auto M = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd q(2, 2);
        const double a = 0.5 * t + 0.2;
        q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 0) = 2 + t;
        d(1, 1) = 2 - t;
        const double b = 0.3 * t - 0.1;
        Eigen::MatrixXd q2(2, 2);
        q2 << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
        return (q * d * q2).eval();
      },
      iv, 1e-12);
  const auto f = smooth_svd(M, 1e-9);
  CHECK(f.rank == 2);
  CHECK(svd_residuals(f, M) <= 1e-9);
  CHECK(max_step_jump(f.U) <= 0.1);
  CHECK(max_step_jump(f.V) <= 0.1);
}

TEST_CASE("rank change across the interval is refused") {
  const auto M = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = t;
        return m;
      },
      Interval(-1, 1), 1e-12);
  CHECK_THROWS_AS((void)smooth_svd(M, 1e-9), RankChangeError);
}

TEST_CASE("random full-rank rectangular blocks from the generator") {
  for (const std::uint64_t seed : {4ULL, 9ULL}) {
    GenSpec spec;
    spec.sig = BlockSignature({3, 2});
    spec.variant = SutVariant::columns;
    spec.entry_degree = 3;
    spec.seed = seed;
    const auto inst = random_sut(spec);
    const auto blk = inst.N.block(0, 3, 3, 2);
    const auto f = smooth_svd(blk, 1e-9);
    CHECK(f.rank == 2);
    CHECK(svd_residuals(f, blk) <= 1e-9);
  }
}

}  // TEST_SUITE
