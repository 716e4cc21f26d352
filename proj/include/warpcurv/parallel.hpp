#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace warpcurv {

/// Worker count for `jobs` independent tasks. `requested <= 0` means "use the
/// hardware"; the WARPCURV_THREADS environment variable caps the result.
inline int effective_threads(int requested, int jobs) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("WARPCURV_THREADS")) {
    const int e = std::atoi(env);
    if (e > 0 && e < cap) cap = e;
  }
  if (cap > jobs) cap = jobs;
  return cap < 1 ? 1 : cap;
}

/// Runs fn(0), ..., fn(count - 1) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome is independent of scheduling.
inline void parallel_for_index(int count, int threads, const std::function<void(int)>& fn) {
  threads = effective_threads(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next(0);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace warpcurv
