#include "thermvisc/parallel.hpp"

#include <cstdlib>
#include <string>

#if defined(THERMVISC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace thermvisc {

int thread_count() {
  static const int cached = [] {
    int n = 1;
#if defined(THERMVISC_HAVE_OPENMP)
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("THERMVISC_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap > 0 && cap < n) n = cap;
        if (cap > 0 && n < 1) n = cap;
      } catch (...) {
      }
    }
    return n < 1 ? 1 : n;
  }();
  return cached;
}

}  // namespace thermvisc
