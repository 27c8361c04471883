#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ibptc {

// Worker budget: IBPTC_THREADS, with 0 or unset meaning the hardware count.
inline int worker_count() {
  if (const char* env = std::getenv("IBPTC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for every i in [0, n). Work items must write only to their own
// slots; callers do any order-sensitive reduction afterwards, in index order,
// which keeps results independent of the worker count.
inline void parallel_for(long n, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::min<long>(worker_count(), n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  auto drain = [&] {
    for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

}  // namespace ibptc
