#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace scorebands {

/// Worker count for parallel loops: SCOREBANDS_THREADS when set, otherwise the
/// hardware concurrency.
inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("SCOREBANDS_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return static_cast<std::size_t>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<std::size_t>(hw);
}

/// Runs fn(begin, end) over a static partition of [0, n). Work items must
/// write to disjoint slots; combined with per-index derived RNG streams this
/// keeps results identical for every thread count. The first worker exception
/// is rethrown on the calling thread.
inline void parallel_for_ranges(std::size_t n, std::size_t n_threads,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  n_threads = std::clamp<std::size_t>(n_threads, 1, n);
  if (n_threads == 1) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, &first_error, &error_mutex, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace scorebands
