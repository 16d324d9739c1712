#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace projprime {

/// Runs body(i) for i in [0, count) on `workers` OpenMP threads, dynamic
/// schedule.  The first exception by index is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace projprime
