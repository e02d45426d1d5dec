#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gtg {

// Runs fn(i) for i in [0, count). Work is claimed from a shared counter, so
// scheduling varies between runs, but callers must write result i into a
// pre-sized slot i: outputs are then independent of worker count and order.
inline void parallel_for(size_t count, int workers,
                         const std::function<void(size_t)>& fn) {
  if (count == 0) return;
  const int hw = int(std::thread::hardware_concurrency());
  int n_workers = workers > 0 ? workers : std::max(1, hw);
  n_workers = int(std::min<size_t>(size_t(n_workers), count));
  if (n_workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(size_t(n_workers));
  for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gtg
