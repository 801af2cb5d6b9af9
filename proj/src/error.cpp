#include "pmkrsa/error.hpp"

namespace pmkrsa {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MalformedKeyFile: return "MalformedKeyFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedBody: return "TruncatedBody";
    case ErrorCode::TrailingGarbage: return "TrailingGarbage";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::SentinelViolation: return "SentinelViolation";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::MessageTooLarge: return "MessageTooLarge";
    case ErrorCode::EvenModulus: return "EvenModulus";
    case ErrorCode::ZeroModulus: return "ZeroModulus";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::TaskFailed: return "TaskFailed";
    case ErrorCode::MismatchedConfigs: return "MismatchedConfigs";
    case ErrorCode::TrendViolation: return "TrendViolation";
    case ErrorCode::SelfTestFailed: return "SelfTestFailed";
    case ErrorCode::BlindGenerationFailed: return "BlindGenerationFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::size_t offset)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message +
                         (offset == kNoOffset ? std::string() : " (at byte offset " + std::to_string(offset) + ")")),
      code_(code),
      offset_(offset) {}

}  // namespace pmkrsa
