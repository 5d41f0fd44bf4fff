#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rmp {

// Splits [0, count) into fixed-size blocks and hands each block to fn(begin,
// end).  Block boundaries do not depend on the worker count, and callers write
// only into per-index slots, so output is identical for any thread count.
template <class Fn>
void parallel_blocks(int64_t count, int64_t block, int threads, Fn&& fn) {
  if (count <= 0) return;
  block = std::max<int64_t>(1, block);
  int64_t nblocks = (count + block - 1) / block;
  threads = std::max(1, threads);
  if (threads == 1 || nblocks == 1) {
    for (int64_t b = 0; b < nblocks; ++b)
      fn(b * block, std::min(count, (b + 1) * block));
    return;
  }
  std::atomic<int64_t> nextBlock{0};
  std::exception_ptr firstError;
  std::mutex errMutex;
  auto worker = [&] {
    for (;;) {
      int64_t b = nextBlock.fetch_add(1);
      if (b >= nblocks) return;
      try {
        fn(b * block, std::min(count, (b + 1) * block));
      } catch (...) {
        std::lock_guard<std::mutex> lock(errMutex);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int nworkers = static_cast<int>(std::min<int64_t>(threads, nblocks));
  pool.reserve(static_cast<size_t>(nworkers));
  for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace rmp
