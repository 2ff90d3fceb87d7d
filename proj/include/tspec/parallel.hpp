#pragma once
// Minimal index-parallel loop for embarrassingly parallel grid sweeps.
// Results must be written to disjoint slots so assembly stays deterministic.

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tspec {

// Runs fn(i) for i in [0, count) on up to `jobs` threads (jobs <= 0 picks the
// hardware concurrency). The first exception thrown by any worker is
// rethrown after all workers have joined.
inline void parallel_for(std::size_t count, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t want = jobs > 0 ? static_cast<std::size_t>(jobs)
                              : static_cast<std::size_t>(hw ? hw : 1);
  want = std::min(want, count);
  if (want <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(want);
  for (std::size_t w = 0; w < want; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tspec
