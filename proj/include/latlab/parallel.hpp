#ifndef LATLAB_PARALLEL_HPP
#define LATLAB_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace latlab {

inline unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Splits [0, count) into `chunks` contiguous pieces and runs body(chunk, begin, end)
// on up to `threads` workers. Chunk boundaries depend only on `count` and `chunks`,
// so per-chunk results combined in chunk order are independent of the thread count.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned threads, Body&& body) {
  if (count == 0) return;
  chunks = std::max<std::size_t>(1, std::min(chunks, count));
  threads = std::max(1u, threads);
  auto bounds = [&](std::size_t c) { return std::pair{c * count / chunks, (c + 1) * count / chunks}; };
  if (threads == 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      body(c, b, e);
    }
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t c = w; c < chunks; c += workers) {
            auto [b, e] = bounds(c);
            body(c, b, e);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// SplitMix64 finalizer; used to derive per-chunk seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace latlab

#endif
