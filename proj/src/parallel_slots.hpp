#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace parboost::detail {

// Runs fn(0..n_tasks) split into contiguous chunks, one thread each. Tasks
// must write only to their own slots, so scheduling cannot change results.
// The first exception thrown by any task is rethrown after the join.
template <typename Fn>
void parallel_slots(std::size_t n_tasks, int parallelism, Fn&& fn) {
  if (parallelism <= 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), n_tasks);
  const std::size_t chunk = (n_tasks + n_threads - 1) / n_threads;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t th = 0; th < n_threads; ++th) {
    const std::size_t begin = th * chunk;
    const std::size_t end = std::min(n_tasks, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace parboost::detail
