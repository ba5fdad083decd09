#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace smlab {

/// Worker count meaning "use available parallelism".
inline constexpr unsigned kAutoWorkers = 0;

inline unsigned resolve_workers(unsigned requested) {
  if (requested != kAutoWorkers) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads and returns the
/// results in index order. The output is independent of the worker count as
/// long as fn(i) depends only on i.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(n);
  const unsigned pool = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (unsigned w = 0; w < pool; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            out[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace smlab
