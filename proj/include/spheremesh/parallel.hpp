#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spheremesh {

/// Worker count: hardware concurrency, capped by the SPHEREMESH_THREADS
/// environment variable when set.
inline int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("SPHEREMESH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

/// Runs fn(begin, end) over a block partition of [0, n). Falls back to a
/// single inline call for one worker or small n.
inline void parallel_for_blocks(int n,
                                const std::function<void(int, int)>& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 256) {
    fn(0, n);
    return;
  }
  const int blocks = std::min(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(blocks);
  const int chunk = (n + blocks - 1) / blocks;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int b = 0; b < blocks; ++b) {
    const int begin = b * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end]() {
      try {
        fn(begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spheremesh
