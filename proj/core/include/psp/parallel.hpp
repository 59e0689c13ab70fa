#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace psp {

/// Runs body(0) .. body(count - 1) on up to `jobs` threads. Each index is
/// claimed exactly once; callers make runs deterministic by writing into
/// per-index slots and aggregating afterwards. The first exception thrown
/// by any body is rethrown after all threads join.
inline void parallel_for(int count, int jobs,
                         const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (jobs > count) jobs = count;
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          body(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace psp
