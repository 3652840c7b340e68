#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spinecho {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic parallel map over [0, n) in fixed-size chunks. Each chunk is
// processed as a unit and its result stored by chunk index, so the final
// chunk-ordered combine is independent of the number of workers. Chunk size
// is a constant of the call site, never derived from the thread count.
template <typename Partial, typename ChunkFn, typename CombineFn>
void parallel_chunks(std::size_t n, std::size_t chunk_size, int threads,
                     ChunkFn&& per_chunk, CombineFn&& combine,
                     const Partial& init) {
  if (n == 0) return;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(n_chunks, init);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * chunk_size;
    const std::size_t hi = std::min(lo + chunk_size, n);
    per_chunk(lo, hi, partials[c]);
  };

  const int n_workers = std::min<std::size_t>(resolve_thread_count(threads), n_chunks);
  if (n_workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks;
             c = next.fetch_add(1)) {
          run_chunk(c);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t c = 0; c < n_chunks; ++c) combine(partials[c]);
}

}  // namespace spinecho
