#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace hallfiber {

/// Name of the environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "HALLFIBER_WORKERS";

/// Worker count: explicit request, else $HALLFIBER_WORKERS, else the hardware
/// concurrency. Always >= 1.
int resolve_workers(std::optional<int> requested = std::nullopt);

/// Runs body(i) for i in [0, count) on `workers` threads.
///
/// Index i goes to worker i % workers, so the assignment never depends on
/// timing. Results must be written to per-index slots by the caller. If any
/// call throws, the exception of the smallest failing index is rethrown after
/// all threads have joined.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                                              std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();

  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < count; i += w) {
      if (i > first_failure.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
          first_failure.store(i, std::memory_order_relaxed);
        }
        return;
      }
    }
  };

  if (w == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(w - 1);
    for (std::size_t t = 1; t < w; ++t) threads.emplace_back(run, t);
    run(0);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hallfiber
