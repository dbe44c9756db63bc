#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace condorcet {

/// Worker count: CONDORCET_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("CONDORCET_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
// Set on worker threads so nested parallel_for calls run inline.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Calls body(i) for i in [0, count), splitting the range into contiguous
/// blocks over at most thread_count() threads. body must only write to
/// index-owned state. An exception from body is rethrown after all workers
/// finish.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1 || detail::in_worker) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_worker = true;
      const std::size_t lo = count * w / workers;
      const std::size_t hi = count * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // lowest block's error wins, independent of timing
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace condorcet
