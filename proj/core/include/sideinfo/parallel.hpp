#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace sideinfo {

/// Worker count for the searches that fan out. Results never depend on it.
struct Parallelism {
  unsigned workers = 1;
};

/// Splits [0, count) into `chunks` contiguous ranges and runs
/// fn(chunk, begin, end) for each, on up to `workers` threads. Chunk
/// boundaries depend only on (count, chunks), so per-chunk results reduced in
/// chunk order are independent of the worker count.
template <typename Fn>
void for_each_chunk(std::uint64_t count, std::size_t chunks, Parallelism par, Fn&& fn) {
  chunks = std::max<std::size_t>(1, chunks);
  auto bound = [&](std::size_t c) { return count * c / chunks; };
  const unsigned workers = std::max(1U, std::min<unsigned>(par.workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bound(c), bound(c + 1));
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) fn(c, bound(c), bound(c + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sideinfo
