#include "streamprune/stream_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "streamprune/error.hpp"

namespace streamprune {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'K', 'N'};

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= std::uint32_t{in[b]} << (8 * b);
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void append_floats(std::vector<std::uint8_t>& out, std::span<const float> values) {
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(float));
  std::uint8_t* dst = out.data() + offset;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, values.data(), values.size() * sizeof(float));
  } else {
    for (float f : values) {
      put_u32(dst, std::bit_cast<std::uint32_t>(f));
      dst += 4;
    }
  }
}

StreamHeader header_for(std::span<const TokenGrid> frames) {
  StreamHeader header;
  header.frame_count = checked_u32(frames.size(), "frame count");
  if (frames.empty()) return header;
  const TokenGrid& first = frames.front();
  for (std::size_t f = 1; f < frames.size(); ++f) {
    if (!frames[f].same_layout(first)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "frame " + std::to_string(f) + " is " + std::to_string(frames[f].width()) +
                      "x" + std::to_string(frames[f].height()) + "x" +
                      std::to_string(frames[f].dim()) + ", frame 0 is " +
                      std::to_string(first.width()) + "x" + std::to_string(first.height()) +
                      "x" + std::to_string(first.dim()));
    }
  }
  header.width = checked_u32(first.width(), "W");
  header.height = checked_u32(first.height(), "H");
  header.dim = checked_u32(first.dim(), "D");
  return header;
}

void encode_header(const StreamHeader& header, std::uint8_t* out) {
  std::memcpy(out, kMagic, 4);
  out[4] = kStreamVersion;
  out[5] = kDtypeFloat32;
  out[6] = 0;
  out[7] = 0;
  put_u32(out + 8, header.frame_count);
  put_u32(out + 12, header.width);
  put_u32(out + 16, header.height);
  put_u32(out + 20, header.dim);
}

}  // namespace

std::vector<std::uint8_t> encode_stream(std::span<const TokenGrid> frames) {
  const StreamHeader header = header_for(frames);
  std::vector<std::uint8_t> out(kStreamHeaderBytes);
  encode_header(header, out.data());
  out.reserve(header.file_bytes());
  for (const auto& frame : frames) append_floats(out, frame.data());
  return out;
}

void write_stream(const std::filesystem::path& path, std::span<const TokenGrid> frames) {
  const StreamHeader header = header_for(frames);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  }
  std::uint8_t head[kStreamHeaderBytes];
  encode_header(header, head);
  out.write(reinterpret_cast<const char*>(head), kStreamHeaderBytes);

  std::vector<std::uint8_t> chunk;
  for (const auto& frame : frames) {
    chunk.clear();
    append_floats(chunk, frame.data());
    out.write(reinterpret_cast<const char*>(chunk.data()),
              static_cast<std::streamsize>(chunk.size()));
  }
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

StreamReader::StreamReader(const std::filesystem::path& path) : path_(path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot stat " + path.string() + ": " + ec.message());
  in_.open(path, std::ios::binary);
  if (!in_) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());

  std::uint8_t head[kStreamHeaderBytes] = {};
  const std::size_t head_len = std::min<std::uintmax_t>(size, kStreamHeaderBytes);
  in_.read(reinterpret_cast<char*>(head), static_cast<std::streamsize>(head_len));
  if (head_len >= 4 && std::memcmp(head, kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, path.string() + " is not a token stream", 0);
  }
  if (head_len < kStreamHeaderBytes) {
    throw Error(ErrorCode::TruncatedFile,
                path.string() + " ends inside the " + std::to_string(kStreamHeaderBytes) +
                    "-byte header",
                size);
  }
  if (head[4] != kStreamVersion) {
    throw Error(ErrorCode::UnsupportedVersion,
                "version " + std::to_string(head[4]) + " in " + path.string(), 4);
  }
  if (head[5] != kDtypeFloat32) {
    throw Error(ErrorCode::UnsupportedDtype,
                "dtype " + std::to_string(head[5]) + " in " + path.string(), 5);
  }
  header_.frame_count = get_u32(head + 8);
  header_.width = get_u32(head + 12);
  header_.height = get_u32(head + 16);
  header_.dim = get_u32(head + 20);
  if (header_.frame_count > 0 &&
      (header_.width == 0 || header_.height == 0 || header_.dim == 0)) {
    throw Error(ErrorCode::ShapeMismatch, "zero grid extent in " + path.string(), 12);
  }

  // W*H*D*4 can exceed 64 bits only for absurd headers; those are truncated
  // files by definition.
  const long double expected =
      static_cast<long double>(kStreamHeaderBytes) +
      static_cast<long double>(header_.frame_count) * header_.width * header_.height *
          header_.dim * sizeof(float);
  if (static_cast<long double>(size) < expected) {
    throw Error(ErrorCode::TruncatedFile,
                path.string() + " has " + std::to_string(size) + " bytes, header implies " +
                    std::to_string(header_.file_bytes()),
                size);
  }
  if (size > header_.file_bytes()) {
    throw Error(ErrorCode::TrailingBytes,
                path.string() + " has " + std::to_string(size - header_.file_bytes()) +
                    " bytes past the last frame",
                header_.file_bytes());
  }
}

std::optional<TokenGrid> StreamReader::next() {
  if (frames_read_ >= header_.frame_count) return std::nullopt;
  const std::uint64_t frame_offset =
      kStreamHeaderBytes + std::uint64_t{frames_read_} * header_.frame_bytes();
  const std::size_t bytes = static_cast<std::size_t>(header_.frame_bytes());
  scratch_.resize(bytes);
  in_.read(scratch_.data(), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in_.gcount()) != bytes) {
    throw Error(ErrorCode::TruncatedFile, "short read in " + path_.string(),
                frame_offset + static_cast<std::uint64_t>(in_.gcount()));
  }

  std::vector<float> values(bytes / sizeof(float));
  const auto* src = reinterpret_cast<const std::uint8_t*>(scratch_.data());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const float v = std::bit_cast<float>(get_u32(src + 4 * k));
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue,
                  "frame " + std::to_string(frames_read_) + " of " + path_.string(),
                  frame_offset + 4 * k);
    }
    values[k] = v;
  }
  ++frames_read_;
  return TokenGrid::make(header_.width, header_.height, header_.dim, std::move(values));
}

std::vector<TokenGrid> read_stream(const std::filesystem::path& path) {
  StreamReader reader(path);
  std::vector<TokenGrid> frames;
  frames.reserve(reader.header().frame_count);
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return frames;
}

}  // namespace streamprune
