#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace dfvem {

/// Runs body(i) for i in [0, n) on up to `threads` workers, in contiguous chunks.
/// The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int n, int threads, Body body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t * n / threads; i < (t + 1) * n / threads; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dfvem
