#include "streamprune/error.hpp"

namespace streamprune {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           std::optional<std::uint64_t> offset) {
  std::string out{to_string(code)};
  out += ": ";
  out += message;
  if (offset) {
    out += " (at byte offset " + std::to_string(*offset) + ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::uint64_t> byte_offset)
    : std::runtime_error(format_message(code, message, byte_offset)),
      code_(code),
      byte_offset_(byte_offset) {}

}  // namespace streamprune
