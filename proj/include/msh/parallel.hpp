#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace msh {

// requested <= 0 resolves to the hardware concurrency (at least 1).
int resolve_thread_count(int requested);

// Runs fn(i) for i in [0, count), split into contiguous blocks of indices,
// one block per worker. fn must only touch state owned by index i and must
// not throw; under that contract the result is identical for any worker
// count, so thread count never changes numerics.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_thread_count(threads)),
                            count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace msh
