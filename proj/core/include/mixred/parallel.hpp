#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mixred {

// Process-wide worker count used by parallel_for. Set from the command line
// (--threads); defaults to the hardware concurrency.
void set_num_threads(std::size_t n);
std::size_t num_threads();

// Runs body(begin, end) over a partition of [0, n) on num_threads() threads.
// Each index is visited exactly once and all writes must go to per-index
// slots, so results do not depend on the thread count.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  std::size_t workers = num_threads();
  if (workers <= 1 || n < 2 * workers) {
    if (n > 0) body(0, n);
    return;
  }
  if (workers > n) workers = n;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mixred
