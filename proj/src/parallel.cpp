#include "pmkrsa/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace pmkrsa {

unsigned ParallelConfig::resolved_workers() const noexcept {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

unsigned workers_from_env(unsigned fallback) {
  const char* raw = std::getenv("PMKRSA_THREADS");
  if (raw == nullptr) return fallback;
  const std::string_view text(raw);
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return fallback;
  return value;
}

TaskFailed::TaskFailed(std::size_t index, std::exception_ptr cause, const std::string& what)
    : Error(ErrorCode::TaskFailed, "task " + std::to_string(index) + " failed: " + what),
      index_(index),
      cause_(std::move(cause)) {}

namespace detail {

void throw_task_failed(std::size_t index, std::exception_ptr cause) {
  std::string what = "unknown exception";
  try {
    std::rethrow_exception(cause);
  } catch (const std::exception& e) {
    what = e.what();
  } catch (...) {
  }
  throw TaskFailed(index, std::move(cause), what);
}

}  // namespace detail

}  // namespace pmkrsa
