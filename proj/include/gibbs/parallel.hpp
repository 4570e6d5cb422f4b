#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace gibbs {

/// Selects the OpenMP kernel or the serial reference loop. Both produce
/// bit-identical results: work item i always sees the same inputs and
/// reductions run serially in index order afterwards.
enum class Execution { serial, parallel };

/// Runs body(i) for i in [0, count). Exceptions thrown inside the parallel
/// region are captured and the one from the lowest index is rethrown.
template <typename Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(omp_get_max_threads()));
  std::vector<std::size_t> first_bad(errors.size(), count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    if (errors[t]) continue;
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[t] = std::current_exception();
      first_bad[t] = static_cast<std::size_t>(i);
    }
  }
  std::size_t best = count;
  std::exception_ptr err;
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (errors[t] && first_bad[t] < best) {
      best = first_bad[t];
      err = errors[t];
    }
  }
  if (err) std::rethrow_exception(err);
}

/// Number of OpenMP workers used by Execution::parallel.
inline void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

}  // namespace gibbs
