#pragma once

#include <cstddef>
#include <thread>
#include <vector>

// Minimal deterministic work splitter: the index range is cut into
// contiguous chunks, one per worker, so results that are written per-index
// are identical for any worker count.

namespace relax2d {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

template <typename Body>  // Body: void(std::size_t begin, std::size_t end, int worker)
void parallel_chunks(std::size_t n, int threads, Body&& body) {
  const int nw = std::max(1, threads);
  if (nw == 1 || n < 2) {
    body(std::size_t(0), n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(nw));
  const std::size_t chunk = (n + std::size_t(nw) - 1) / std::size_t(nw);
  for (int w = 0; w < nw; ++w) {
    const std::size_t b = std::min(n, std::size_t(w) * chunk);
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace relax2d
