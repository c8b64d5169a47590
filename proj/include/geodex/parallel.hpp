#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace geodex {

// 0 means "pick for me": the GE_THREADS environment variable if set and
// positive, otherwise hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(begin, end) over [0, n) split into contiguous blocks, one per
// worker. Callers own determinism: blocks must write disjoint outputs, or
// produce partials that the caller combines in fixed order. With
// threads <= 1 this is a plain function call.
template <typename Fn>
void parallel_for_blocks(std::int64_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  threads = std::min<std::int64_t>(std::max(threads, 1), n);
  if (threads == 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::int64_t b = t * chunk;
    std::int64_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace geodex
