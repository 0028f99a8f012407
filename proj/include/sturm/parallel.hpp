#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sturm {

// Runs fn(i) for every i in [0, count) across at most `jobs` threads. Results
// must go into caller-owned slots indexed by i, so output order never depends
// on scheduling. The first exception thrown by any task is rethrown after all
// threads join.
inline void parallel_for(std::uint64_t count, int jobs,
                         const std::function<void(std::uint64_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  std::uint64_t workers = static_cast<std::uint64_t>(jobs);
  if (hw > 0 && workers > hw) workers = hw;
  if (workers > count) workers = count;

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::uint64_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sturm
