#pragma once
// Deterministic index-space parallel_for. Work items are partitioned into
// contiguous blocks by index before any thread starts, so each item always
// lands in the same block regardless of thread count; callers that write
// results into per-index slots get identical output for any `threads` value.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace spinmet {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, count). Deterministic for any thread count as
// long as body(i) touches only state owned by index i.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
  const int n_threads =
      std::min<std::size_t>(resolve_thread_count(threads), std::max<std::size_t>(count, 1));
  if (n_threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t block = (count + n_threads - 1) / n_threads;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * block;
    const std::size_t hi = std::min(count, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace spinmet
