#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lpisim {

/// Runs body(i) for i in [0, count) on up to `max_workers` threads
/// (0: hardware_concurrency). Iterations must be independent; the first
/// exception is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t max_workers = 0) {
  const std::size_t limit =
      max_workers > 0 ? max_workers : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(count, limit);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lpisim
