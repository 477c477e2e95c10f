#include "sscf/parallel.hpp"

#include <atomic>

namespace sscf::par {

namespace {
std::atomic<Mode> g_mode{
#ifdef SSCF_HAVE_OPENMP
    Mode::openmp
#else
    Mode::serial
#endif
};
}  // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }

void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

bool openmp_available() {
#ifdef SSCF_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef SSCF_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace sscf::par
