#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hvf {

// Worker count for parallel_for. HVF_WORKERS overrides hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("HVF_WORKERS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) return unsigned(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

namespace detail {
inline thread_local bool inside_parallel = false;
}

// Index-parallel loop. fn(i) must write results to per-index slots and must
// not throw. Nested invocations run serially so the worker count stays bounded
// no matter how deep the planner recursion goes.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  const unsigned workers = worker_count();
  if (detail::inside_parallel || workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    detail::inside_parallel = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      fn(i);
    }
    detail::inside_parallel = false;
  };
  const unsigned spawn = unsigned(std::min<std::size_t>(workers, n)) - 1;
  std::vector<std::thread> pool;
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

}  // namespace hvf
