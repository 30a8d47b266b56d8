#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace star {

/// Non-positive requests mean "all hardware threads".
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [0, n) into `shards` contiguous blocks; block s is
/// [bounds[s], bounds[s + 1]). The split depends only on (n, shards).
inline std::vector<std::size_t> shard_bounds(std::size_t n, std::size_t shards) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(n, 1)));
  std::vector<std::size_t> bounds(shards + 1);
  for (std::size_t s = 0; s <= shards; ++s) bounds[s] = n * s / shards;
  return bounds;
}

/// Runs fn(shard, begin, end) for each contiguous block of [0, n), one thread
/// per block. The first exception thrown by any block is rethrown.
template <typename Fn>
void parallel_shards(std::size_t n, int workers, Fn&& fn) {
  auto bounds = shard_bounds(n, static_cast<std::size_t>(resolve_workers(workers)));
  const std::size_t shards = bounds.size() - 1;
  if (shards == 1) {
    fn(std::size_t{0}, bounds[0], bounds[1]);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  {
    std::vector<std::jthread> threads;
    threads.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) {
      threads.emplace_back([&, s] {
        try {
          fn(s, bounds[s], bounds[s + 1]);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace star
