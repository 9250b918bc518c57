#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace streamprune {

enum class ErrorCode {
  ShapeMismatch,
  NonFiniteValue,
  ZeroVector,
  InvalidConfig,
  BadMagic,
  UnsupportedVersion,
  UnsupportedDtype,
  TruncatedFile,
  TrailingBytes,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `byte_offset()` is set for errors
/// tied to a position in a token-stream file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> byte_offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> byte_offset_;
};

}  // namespace streamprune
