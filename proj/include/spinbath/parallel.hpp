#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace spinbath {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Static round-robin partition of [0, n): item i runs on thread i % n_threads
// and writes only its own output slot, so results are identical for any
// thread count. fn(item_index, worker_index). The first exception thrown by
// any worker is rethrown on the caller.
template <class Fn>
void parallel_for(int n_items, int n_threads, Fn&& fn) {
  n_threads = std::min(n_threads, n_items);
  if (n_threads <= 1) {
    for (int i = 0; i < n_items; ++i) fn(i, 0);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n_items; i += n_threads) fn(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spinbath
