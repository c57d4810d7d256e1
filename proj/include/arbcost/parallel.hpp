#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace arbcost {

/// Worker cap used when a call passes threads = 0. Reads ARBCOST_THREADS,
/// falling back to the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("ARBCOST_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over contiguous blocks of [0, n). Block boundaries
/// never influence results because callers write per-index outputs only.
/// The first exception thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_blocks(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = std::min(n, w * chunk);
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace arbcost
