#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "pmkrsa/error.hpp"

namespace pmkrsa {

struct ParallelConfig {
  unsigned workers = 0;  // 0 = one per logical core
  std::size_t grain = 1;  // minimum items per task

  unsigned resolved_workers() const noexcept;
};

/// Reads PMKRSA_THREADS; falls back to `fallback` when unset or invalid.
unsigned workers_from_env(unsigned fallback = 0);

/// A task threw. Carries the lowest failing index and the original exception.
class TaskFailed : public Error {
 public:
  TaskFailed(std::size_t index, std::exception_ptr cause, const std::string& what);

  std::size_t index() const noexcept { return index_; }
  std::exception_ptr cause() const noexcept { return cause_; }
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

namespace detail {
[[noreturn]] void throw_task_failed(std::size_t index, std::exception_ptr cause);
}

/// out[t] = fn(t) for t in [0, count).
///
/// Workers claim blocks of `grain` indices from a shared counter and write
/// results into pre-sized slots, so output never depends on the worker count.
/// If tasks throw, every block below the lowest failure still runs and the
/// lowest failing index is reported as TaskFailed once all workers stop.
template <class Fn>
auto par_map_index(std::size_t count, Fn&& fn, const ParallelConfig& config = {})
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  static_assert(!std::is_same_v<Result, bool>, "vector<bool> slots are not independently writable");
  std::vector<Result> out(count);
  const std::size_t grain = std::max<std::size_t>(config.grain, 1);
  const std::size_t blocks = (count + grain - 1) / grain;
  const std::size_t workers = std::min<std::size_t>(config.resolved_workers(), blocks);

  if (workers <= 1) {
    for (std::size_t t = 0; t < count; ++t) {
      try {
        out[t] = fn(t);
      } catch (...) {
        detail::throw_task_failed(t, std::current_exception());
      }
    }
    return out;
  }

  std::atomic<std::size_t> next_block{0};
  std::atomic<std::size_t> lowest_failure{std::numeric_limits<std::size_t>::max()};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t block = next_block.fetch_add(1, std::memory_order_relaxed);
      if (block >= blocks) return;
      const std::size_t begin = block * grain;
      if (begin >= lowest_failure.load(std::memory_order_acquire)) return;
      const std::size_t end = std::min(count, begin + grain);
      for (std::size_t t = begin; t < end; ++t) {
        try {
          out[t] = fn(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (t < lowest_failure.load(std::memory_order_relaxed)) {
            lowest_failure.store(t, std::memory_order_release);
            failure = std::current_exception();
          }
          break;
        }
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) detail::throw_task_failed(lowest_failure.load(), failure);
  return out;
}

/// out[t] = fn(t, items[t]).
template <class T, class Fn>
auto par_map(std::span<const T> items, Fn&& fn, const ParallelConfig& config = {})
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, const T&>> {
  return par_map_index(
      items.size(), [&](std::size_t t) { return fn(t, items[t]); }, config);
}

}  // namespace pmkrsa
