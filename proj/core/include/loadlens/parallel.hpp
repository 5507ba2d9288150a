#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace loadlens {

/// Worker count resolution: explicit value > 0 wins, else the LOADLENS_WORKERS
/// environment variable, else hardware concurrency.
inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOADLENS_WORKERS")) {
    int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(shard_index, begin, end) over `workers` contiguous shards of
/// [0, n). Shards run on their own threads; the caller merges per-shard
/// results in shard order. All merged state in this codebase is integral or
/// index-keyed, so any shard partitioning yields identical results.
template <typename Fn>
void parallel_shards(std::size_t n, int workers, Fn&& fn) {
  if (workers < 1) workers = 1;
  std::size_t shards = static_cast<std::size_t>(workers);
  if (shards > n) shards = n == 0 ? 1 : n;
  if (shards <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(shards);
  std::size_t chunk = n / shards;
  std::size_t rem = n % shards;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    std::size_t end = begin + chunk + (s < rem ? 1 : 0);
    threads.emplace_back([&fn, s, begin, end] { fn(s, begin, end); });
    begin = end;
  }
  for (auto& t : threads) t.join();
}

}  // namespace loadlens
