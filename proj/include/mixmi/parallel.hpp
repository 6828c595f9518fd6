#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace mixmi {

/// Worker count for a request of `requested` (0 means one per hardware thread).
inline std::size_t resolve_workers(std::size_t requested) noexcept {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `workers` threads. Tasks are
/// claimed dynamically, so bodies must write only to task-owned outputs.
/// Every task runs even after a failure; the exception from the lowest
/// failing index is rethrown, independent of scheduling.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::min(resolve_workers(workers), count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    if (workers > 1) pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

/// Pairwise (cascade) summation in index order. Deterministic for a given
/// input order and O(log n) error growth.
inline double pairwise_sum(std::span<const double> x) noexcept {
  constexpr std::size_t kLeaf = 8;
  if (x.size() <= kLeaf) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace mixmi
