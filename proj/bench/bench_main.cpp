// Serial vs OpenMP comparison for the grid kernels: adaptive fits, pointwise
// SVD sweeps, certificates and full pipeline runs.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "sscf/canon_col.hpp"
#include "sscf/genbench.hpp"
#include "sscf/parallel.hpp"
#include "sscf/svd.hpp"

using namespace sscf;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f, int reps) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

template <class F>
void compare(const char* name, F&& f, int reps) {
  par::set_mode(par::Mode::serial);
  const double serial = time_ms(f, reps);
  double parallel = serial;
  if (par::openmp_available()) {
    par::set_mode(par::Mode::openmp);
    parallel = time_ms(f, reps);
  }
  std::printf("%-28s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx\n",
              name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", par::max_threads());
  const Interval iv(-1.0, 1.0);

  const auto sampler = [&](double t) {
    Eigen::MatrixXd m(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        m(i, j) = std::sin((i + 1) * t) * std::cos((j + 1) * t) / (2.0 + t);
    return m;
  };
  compare("fit 16x16 trig/rational", [&] {
    (void)MatrixFunction::fit(sampler, iv, 1e-12);
  }, 3);

  const MatrixFunction M = MatrixFunction::fit(sampler, iv, 1e-12);
  compare("min_singular_certificate", [&] {
    (void)min_singular_certificate(M, 257);
  }, 5);

  GenSpec spec;
  spec.sig = BlockSignature({8, 7, 5, 4, 2});
  spec.variant = SutVariant::columns;
  spec.entry_degree = 3;
  spec.seed = 42;
  const SutMatrixFunction inst = random_sut(spec);
  const MatrixFunction blk = inst.N.block(0, 8, 8, 7);
  compare("smooth_svd 8x7 block", [&] {
    (void)smooth_svd(blk, 1e-10);
  }, 3);

  compare("canonicalize_col m=26", [&] {
    (void)canonicalize_col(inst, 1e-8);
  }, 1);

  return 0;
}
