#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace zigzag {

/// Runs fn(i) for i in [0, n). With workers > 1 the index range is split into
/// contiguous chunks, one thread per chunk; results must be written to
/// per-index slots so the merge is deterministic regardless of worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::size_t chunk = (n + nw - 1) / nw;
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace zigzag
