/// @file  parallel.hpp
/// @brief Minimal worker-pool helper for independent, index-addressed tasks.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spose::detail {

/// Runs tasks 0..n_tasks-1 on up to `jobs` worker threads. Each task index is
/// claimed exactly once; tasks must be independent. Results must be written
/// to per-task slots so the outcome is identical for any job count.
template <typename Fn>
void parallel_tasks(int n_tasks, int jobs, Fn&& fn) {
  if (n_tasks <= 0) return;
  const int workers = std::max(1, std::min(jobs, n_tasks));
  if (workers == 1) {
    for (int t = 0; t < n_tasks; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int t = next.fetch_add(1);
        if (t >= n_tasks) return;
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spose::detail
