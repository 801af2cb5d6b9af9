#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pmkrsa {

// Numeric values are part of the C ABI and double as CLI exit codes.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  Io = 2,
  MalformedKeyFile = 3,
  BadMagic = 4,
  UnsupportedVersion = 5,
  TruncatedBody = 6,
  TrailingGarbage = 7,
  LayoutMismatch = 8,
  SentinelViolation = 9,
  NotInvertible = 10,
  MessageTooLarge = 11,
  EvenModulus = 12,
  ZeroModulus = 13,
  NotCoprime = 14,
  TaskFailed = 15,
  MismatchedConfigs = 16,
  TrendViolation = 17,
  SelfTestFailed = 18,
  BlindGenerationFailed = 19,
  Internal = 20,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  static constexpr std::size_t kNoOffset = std::numeric_limits<std::size_t>::max();

  Error(ErrorCode code, const std::string& message, std::size_t offset = kNoOffset);

  ErrorCode code() const noexcept { return code_; }
  // Byte offset into the parsed input, for format errors.
  std::size_t offset() const noexcept { return offset_; }
  bool has_offset() const noexcept { return offset_ != kNoOffset; }

 private:
  ErrorCode code_;
  std::size_t offset_;
};

}  // namespace pmkrsa
