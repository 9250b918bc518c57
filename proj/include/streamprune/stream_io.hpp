#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "streamprune/types.hpp"

namespace streamprune {

// Token-stream file layout, all integers and floats little-endian:
//
//   offset  size  field
//   0       4     magic "STKN"
//   4       1     version (1)
//   5       1     dtype (0 = float32)
//   6       2     reserved, zero
//   8       4     frame_count
//   12      4     W
//   16      4     H
//   20      4     D
//   24      ...   frame_count * W * H * D floats, frame-major, row-major,
//                 embedding dimension innermost
inline constexpr std::size_t kStreamHeaderBytes = 24;
inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 0;

struct StreamHeader {
  std::uint32_t frame_count = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t dim = 0;

  std::uint64_t frame_bytes() const noexcept {
    return std::uint64_t{width} * height * dim * sizeof(float);
  }
  std::uint64_t file_bytes() const noexcept {
    return kStreamHeaderBytes + std::uint64_t{frame_count} * frame_bytes();
  }
};

/// Lazy frame reader. The constructor validates the header and the exact file
/// length; next() decodes one frame at a time.
///
/// Errors: BadMagic, UnsupportedVersion, UnsupportedDtype, TruncatedFile,
/// TrailingBytes, NonFiniteValue and IoFailure, each carrying the byte offset
/// where the problem was found.
class StreamReader {
 public:
  explicit StreamReader(const std::filesystem::path& path);

  const StreamHeader& header() const noexcept { return header_; }
  std::optional<TokenGrid> next();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  StreamHeader header_;
  std::uint32_t frames_read_ = 0;
  std::vector<char> scratch_;
};

std::vector<TokenGrid> read_stream(const std::filesystem::path& path);

/// All frames must share W, H and D (Error{ShapeMismatch}). An empty sequence
/// produces a bare header with zero extents.
void write_stream(const std::filesystem::path& path, std::span<const TokenGrid> frames);

/// In-memory encoding of the same format.
std::vector<std::uint8_t> encode_stream(std::span<const TokenGrid> frames);

}  // namespace streamprune
