#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace catou {

enum class Exec { serial, parallel };

int max_threads();
void set_threads(int n);

// Runs f(i) for i in [0, n). Results must be written by index; reductions
// are done by the caller in index order, which keeps every output
// independent of the thread count. The first exception thrown by any
// worker is rethrown on the calling thread.
template <class F>
void for_each_index(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex err_mu;
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < nn; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lk(err_mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace catou
