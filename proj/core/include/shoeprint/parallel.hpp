#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace shoeprint {

// Process-wide worker count, set once by the CLI. Defaults to 1.
inline std::atomic<int>& worker_thread_setting() {
  static std::atomic<int> threads{1};
  return threads;
}

inline void set_worker_threads(int n) {
  worker_thread_setting().store(n < 1 ? 1 : n);
}

inline int worker_threads() { return worker_thread_setting().load(); }

// Splits [0, n) into one contiguous chunk per worker. Each index is written
// by exactly one worker, so results are identical for any thread count.
template <class Fn>
void parallel_chunks(long long n, Fn&& fn) {
  const int threads = worker_threads();
  if (n <= 0) return;
  if (threads <= 1 || n < 2 * threads) {
    fn(0LL, n);
    return;
  }
  const long long chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const long long begin = t * chunk;
    const long long end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& worker : pool) worker.join();
}

}  // namespace shoeprint
