#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace tracegen {

inline int& thread_count() {
  static int count = 1;
  return count;
}

inline void set_thread_count(int n) { thread_count() = n < 1 ? 1 : n; }

inline int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Static block partition so the work-to-thread mapping is a pure function of
// (n, threads). Results must not depend on scheduling; callers only use this
// where iterations touch disjoint outputs.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
  int threads = thread_count();
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t workers = static_cast<size_t>(threads) < n ? static_cast<size_t>(threads) : n;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    size_t lo = n * w / workers;
    size_t hi = n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace tracegen
