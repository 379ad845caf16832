#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace floc::detail {

inline std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t n = requested == 0 ? std::thread::hardware_concurrency() : requested;
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(work, 1));
}

// Runs body(i) for i in [0, n). The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  threads = resolve_threads(threads, n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace floc::detail
