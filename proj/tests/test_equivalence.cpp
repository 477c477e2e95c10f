#include <doctest.h>

#include "oracles.hpp"
#include "sscf/equivalence.hpp"
#include "sscf/genbench.hpp"

using namespace sscf;

namespace {

const Interval kIv(-1.0, 1.0);

MatrixFunction unit_upper(double sign) {
  return MatrixFunction::fit(
      [sign](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        m(0, 1) = sign * t;
        return m;
      },
      kIv, 1e-12);
}

DaePair random_pair(std::uint64_t seed) {
  SplitMix64 rng = SplitMix64::stream(seed, 21);
  auto rnd = [&](double) {
    Eigen::MatrixXd m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
  };
  // Low-degree random smooth pair.
  const Eigen::MatrixXd a0 = rnd(0), a1 = rnd(0), b0 = rnd(0), b1 = rnd(0);
  return DaePair{
      MatrixFunction::fit([&](double t) { return (a0 + t * a1).eval(); }, kIv, 1e-12),
      MatrixFunction::fit([&](double t) { return (b0 + t * b1).eval(); }, kIv, 1e-12)};
}

EquivalenceTransform random_transform(std::uint64_t seed) {
  SplitMix64 rng = SplitMix64::stream(seed, 22);
  const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
  MatrixFunction K = MatrixFunction::fit(
      [&](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        m(0, 1) = a * t;
        m(0, 0) = 2.0 + b * t;
        return m;
      },
      kIv, 1e-12);
  MatrixFunction L = MatrixFunction::fit(
      [&](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        m(1, 0) = b * t;
        m(1, 1) = 1.5 - a * t * 0.5;
        return m;
      },
      kIv, 1e-12);
  return make_transform(std::move(L), std::move(K));
}

}  // namespace

TEST_SUITE("equivalence") {

TEST_CASE("identity transform leaves pairs unchanged") {
  const auto T = identity_transform(2, kIv);
  const auto p = random_pair(3);
  const auto pt = apply(T, p);
  CHECK(grid_distance(p.E, pt.E) <= 1e-12);
  CHECK(grid_distance(p.F, pt.F) <= 1e-12);
}

TEST_CASE("constant K kills the derivative term") {
  Eigen::MatrixXd k(2, 2), l(2, 2);
  k << 2, 1, 0, 1;
  l << 1, 0, 1, 3;
  const auto T = make_transform(MatrixFunction::constant(l, kIv),
                                MatrixFunction::constant(k, kIv));
  const DaePair p{MatrixFunction::identity(2, kIv), MatrixFunction::zero(2, 2, kIv)};
  const auto pt = apply(T, p);
  CHECK(grid_distance(pt.E, MatrixFunction::constant(l * k, kIv)) <= 1e-12);
  CHECK(sup_abs_on_grid(pt.F) <= 1e-12);
}

TEST_CASE("E = 0 makes the transform a pure congruence of F") {
  const auto K = unit_upper(1.0);
  const auto L = unit_upper(-1.0);  // L = K^{-1}
  const auto T = make_transform(L, K);
  const DaePair p{MatrixFunction::zero(2, 2, kIv), MatrixFunction::identity(2, kIv)};
  const auto pt = apply(T, p);
  CHECK(sup_abs_on_grid(pt.E) <= 1e-12);
  CHECK(grid_distance(pt.F, MatrixFunction::identity(2, kIv)) <= 1e-10);
}

TEST_CASE("compose with the identity is a no-op") {
  const auto T = random_transform(5);
  const auto TI = compose(T, identity_transform(2, kIv));
  CHECK(grid_distance(T.K, TI.K) <= 1e-12);
  CHECK(grid_distance(T.L, TI.L) <= 1e-12);
}

TEST_CASE("compose with the inverse acts as the identity on pairs") {
  const auto T = random_transform(8);
  const auto Tinv = inverse_transform(T, 1e-10);
  const auto both = compose(T, Tinv);
  const auto p = random_pair(9);
  const auto pt = apply(both, p);
  CHECK(grid_distance(p.E, pt.E) <= 1e-8);
  CHECK(grid_distance(p.F, pt.F) <= 1e-8);
}

TEST_CASE("composition is associative on pair application") {
  const auto T1 = random_transform(11), T2 = random_transform(12), T3 = random_transform(13);
  const auto p = random_pair(14);
  const auto lhs = apply(compose(compose(T1, T2), T3), p);
  const auto rhs = apply(T3, apply(T2, apply(T1, p)));
  CHECK(grid_distance(lhs.E, rhs.E) <= 1e-9);
  CHECK(grid_distance(lhs.F, rhs.F) <= 1e-9);
}

TEST_CASE("verify reports zero residual for the identity") {
  const auto p = random_pair(15);
  const auto rep = verify(identity_transform(2, kIv), p, p);
  CHECK(rep.pass);
  CHECK(rep.residual_E <= 1e-13);
  CHECK(rep.residual_F <= 1e-13);
}

TEST_CASE("verify localizes a corrupted target") {
  const auto T = random_transform(16);
  const auto p = random_pair(17);
  auto pt = apply(T, p);
  // Corrupt F~ with a bump that peaks at the right endpoint.
  pt.F = add(pt.F, MatrixFunction::fit(
                       [](double t) {
                         Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
                         m(0, 0) = 1e-3 * (t + 1.0);
                         return m;
                       },
                       kIv, 1e-12));
  const auto rep = verify(T, p, pt, 65, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.residual_F >= 1e-3);
  CHECK(rep.residual_E <= 1e-10);
  CHECK(rep.worst_t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("self-consistency: apply then verify passes") {
  for (const std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    const auto T = random_transform(seed);
    const auto p = random_pair(seed + 50);
    const auto rep = verify(T, p, apply(T, p));
    CHECK(rep.pass);
  }
}

TEST_CASE("equivalence relation properties hold numerically") {
  const auto p = random_pair(31);
  // Reflexivity.
  CHECK(verify(identity_transform(2, kIv), p, p).pass);
  // Symmetry: the inverse transform maps the image back.
  const auto T = random_transform(32);
  const auto pt = apply(T, p);
  const auto back = apply(inverse_transform(T, 1e-10), pt);
  CHECK(grid_distance(back.E, p.E) <= 1e-8);
  CHECK(grid_distance(back.F, p.F) <= 1e-8);
  // Transitivity via compose.
  const auto T2 = random_transform(33);
  const auto two_step = apply(T2, pt);
  const auto composed = apply(compose(T, T2), p);
  CHECK(grid_distance(two_step.E, composed.E) <= 1e-9);
  CHECK(grid_distance(two_step.F, composed.F) <= 1e-9);
}

TEST_CASE("lemma_inner turns the pair into {Ehat, I}") {
  const DaePair trivial{MatrixFunction::zero(2, 2, kIv), MatrixFunction::identity(2, kIv)};
  const auto res = lemma_inner(trivial, MatrixFunction::identity(2, kIv), 1e-9);
  CHECK(sup_abs_on_grid(res.Ehat) <= 1e-12);
  const auto pt = apply(res.T, trivial);
  CHECK(grid_distance(pt.F, MatrixFunction::identity(2, kIv)) <= 1e-9);
}

TEST_CASE("lemma_inner rejects singular G") {
  const DaePair p{MatrixFunction::identity(2, kIv), MatrixFunction::zero(2, 2, kIv)};
  CHECK_THROWS_AS((void)lemma_inner(p, MatrixFunction::identity(2, kIv), 1e-9),
                  NearSingularError);
}

TEST_CASE("lemma_inner keeps a nilpotent pair with K = I") {
  const auto N = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 1) = 2 + t;
        return m;
      },
      kIv, 1e-12);
  const DaePair p{N, MatrixFunction::identity(2, kIv)};
  const auto res = lemma_inner(p, MatrixFunction::identity(2, kIv), 1e-9);
  CHECK(grid_distance(res.Ehat, N) <= 1e-10);
  // F-component of the output pair equals I.
  const auto pt = apply(res.T, p);
  CHECK(grid_distance(pt.F, MatrixFunction::identity(2, kIv)) <= 1e-9);
}

TEST_CASE("lemma_triangular with constant K is a similarity") {
  Eigen::MatrixXd k(2, 2);
  k << 2, 0, 0, 1;
  const auto E = random_pair(41).E;
  const auto res = lemma_triangular(E, MatrixFunction::constant(k, kIv), 1e-9);
  const auto expect = MatrixFunction::constant(k.inverse(), kIv);
  CHECK(grid_distance(res.T.L, expect) <= 1e-10);
  CHECK(grid_distance(res.Ehat, mul(mul(expect, E), MatrixFunction::constant(k, kIv)))
        <= 1e-9);
}

TEST_CASE("lemma_triangular reproduces the worked index-2 reduction") {
  const auto E = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 1) = 2 + t;
        return m;
      },
      kIv, 1e-12);
  const auto K = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 0) = 2 + t;
        m(1, 1) = 1.0;
        return m;
      },
      kIv, 1e-12);
  const auto res = lemma_triangular(E, K, 1e-10);
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 1, 0, 0;
  CHECK(grid_distance(res.Ehat, MatrixFunction::constant(j2, kIv)) <= 1e-10);
  CHECK(res.triangular_structure);  // K^{-1} E K' vanishes here
}

TEST_CASE("strictly triangular K^{-1} E K' never trips the H certificate") {
  for (const std::uint64_t seed : {51ULL, 52ULL, 53ULL}) {
    SplitMix64 rng = SplitMix64::stream(seed, 23);
    // E strictly upper triangular, K block upper triangular (diagonal varies).
    const double a = rng.uniform(0.5, 1.5), b = rng.uniform(-1.0, 1.0);
    const auto E = MatrixFunction::fit(
        [&](double t) {
          Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
          m(0, 1) = a + 0.2 * t;
          m(0, 2) = b * t;
          m(1, 2) = 1.0 + 0.3 * t;
          return m;
        },
        kIv, 1e-12);
    const auto K = MatrixFunction::fit(
        [&](double t) {
          Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
          m(0, 0) = 2.0 + 0.5 * b * t;
          m(0, 1) = a * t;
          m(1, 2) = b * t * t;
          return m;
        },
        kIv, 1e-12);
    const auto res = lemma_triangular(E, K, 1e-9);
    CHECK(res.triangular_structure);
    const auto pt = apply(res.T, DaePair{E, MatrixFunction::identity(3, kIv)});
    CHECK(grid_distance(pt.F, MatrixFunction::identity(3, kIv)) <= 1e-9);
    CHECK(grid_distance(pt.E, res.Ehat) <= 1e-9);
  }
}

TEST_CASE("transform certificates reject singular factors") {
  const auto sing = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        m(0, 0) = t;
        return m;
      },
      kIv, 1e-12);
  CHECK_THROWS_AS((void)make_transform(sing, MatrixFunction::identity(2, kIv)),
                  NearSingularError);
}

}  // TEST_SUITE
