#pragma once

#include <cstddef>

#include "thermvisc/parallel.hpp"

namespace thermvisc {

// Static schedule over [0, n). Bodies must only write to index-owned slots;
// reductions stay serial so results do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
#if defined(THERMVISC_HAVE_OPENMP)
  const int threads = thread_count();
  if (threads > 1 && n >= 1024) {
    const auto sn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < sn; ++i) body(static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace thermvisc

#include <exception>
#include <limits>
#include <mutex>

namespace thermvisc {

// parallel_for that tolerates throwing bodies: the exception raised at the
// lowest index is rethrown after the loop, independent of scheduling.
template <class Body>
void parallel_for_checked(std::size_t n, Body&& body) {
  std::mutex mu;
  std::size_t first = std::numeric_limits<std::size_t>::max();
  std::exception_ptr err;
  parallel_for(n, [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (i < first) {
        first = i;
        err = std::current_exception();
      }
    }
  });
  if (err) std::rethrow_exception(err);
}

}  // namespace thermvisc
