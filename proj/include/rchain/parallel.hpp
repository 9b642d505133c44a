#ifndef RCHAIN_PARALLEL_HPP
#define RCHAIN_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "rchain/compensated.hpp"

namespace rchain {

/// Thread count: explicit request, else RC_THREADS, else hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Deterministic map-reduce over [0, n).
///
/// The index range is cut into fixed chunks of `chunk` items. Each chunk is
/// folded sequentially into its own accumulator, and the chunk accumulators
/// are merged by `pairwise_reduce`. Chunk boundaries and the merge tree are
/// independent of the thread count, so any number of workers reproduces the
/// serial result bit for bit.
template <class Acc, class MakeAcc, class Fold, class Combine>
Acc chunked_reduce(std::size_t n, std::size_t chunk, int threads, MakeAcc make_acc, Fold fold,
                   Combine combine) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  if (n_chunks == 0) return make_acc();

  std::vector<Acc> parts;
  parts.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) parts.push_back(make_acc());

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    for (std::size_t i = begin; i < end; ++i) fold(parts[c], i);
  };

  const int workers = std::min<int>(std::max(threads, 1), static_cast<int>(n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t c = next.fetch_add(1);
          if (c >= n_chunks || failed.load()) return;
          try {
            run_chunk(c);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  return pairwise_reduce(std::move(parts), combine);
}

}  // namespace rchain

#endif  // RCHAIN_PARALLEL_HPP
