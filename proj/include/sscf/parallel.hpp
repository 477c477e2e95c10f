#pragma once

#include <cstddef>

#ifdef SSCF_HAVE_OPENMP
#include <omp.h>
#endif

namespace sscf::par {

enum class Mode { serial, openmp };

/// Current execution mode for grid kernels. Defaults to openmp when built
/// with OpenMP, serial otherwise.
Mode mode();
void set_mode(Mode m);
bool openmp_available();
int max_threads();

/// Runs f(i) for i in [0, n). Each i must write only to its own slots so the
/// serial and parallel paths produce bit-identical results; any reduction over
/// the slots is done by the caller in index order.
template <class F>
void for_index(std::ptrdiff_t n, F&& f) {
#ifdef SSCF_HAVE_OPENMP
  if (mode() == Mode::openmp && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

/// RAII guard that switches the mode and restores the previous one.
class ModeGuard {
 public:
  explicit ModeGuard(Mode m) : prev_(mode()) { set_mode(m); }
  ~ModeGuard() { set_mode(prev_); }
  ModeGuard(const ModeGuard&) = delete;
  ModeGuard& operator=(const ModeGuard&) = delete;

 private:
  Mode prev_;
};

}  // namespace sscf::par
