#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "streamprune/redundancy.hpp"
#include "streamprune/spatial.hpp"
#include "streamprune/temporal.hpp"
#include "streamprune/types.hpp"

namespace streamprune {

/// A buffered video token with its position metadata.
struct RetainedToken {
  std::size_t frame_index = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  std::vector<float> embedding;
  double admission_redundancy = kNoNeighborRedundancy;

  friend bool operator==(const RetainedToken&, const RetainedToken&) = default;
};

struct FrameReport {
  std::size_t frame_index = 0;
  std::size_t total_tokens = 0;
  std::size_t temporal_dropped = 0;
  std::size_t spatial_dropped = 0;
  std::size_t dropped_union = 0;
  std::size_t retained = 0;
  double dropping_ratio = 0.0;
  double latency_us = 0.0;

  friend bool operator==(const FrameReport&, const FrameReport&) = default;
};

/// Full per-frame outcome; `report` is what gets logged.
struct FrameResult {
  FrameReport report;
  BoolGrid temporal_mask;
  BoolGrid spatial_mask;
  BoolGrid drop_mask;  ///< temporal_mask | spatial_mask
};

/// Removes the most redundant tokens (by admission_redundancy, ties to the
/// oldest frame then row-major position) until buffer.size() <= capacity.
/// Relative order of the survivors is preserved. Returns the evicted tokens in
/// eviction order.
std::vector<RetainedToken> evict_most_redundant(std::vector<RetainedToken>& buffer,
                                                std::size_t capacity);

/// Per-stream state for the always-on dataflow.
///
/// Single writer: ingest calls must be serialized in frame order. Const
/// members may run concurrently with each other but not with ingest.
class StreamSession {
 public:
  /// Throws Error{InvalidConfig} for an invalid config.
  explicit StreamSession(PruneConfig config);

  /// Temporal prune against the previous raw frame, spatial prune of the full
  /// frame, OR the masks, buffer the survivors, then evict if over capacity.
  /// The first frame fixes W, H and D; later frames must match
  /// (Error{ShapeMismatch}).
  FrameResult ingest(TokenGrid frame);
  FrameReport ingest_frame(TokenGrid frame) { return ingest(std::move(frame)).report; }

  /// No-op without a capacity. Returns the number of evicted tokens.
  std::size_t evict_if_full();

  /// Buffer contents ordered by (frame, row, col). Does not modify the buffer.
  std::vector<RetainedToken> assemble_query_context() const;

  const PruneConfig& config() const noexcept { return config_; }
  const std::vector<RetainedToken>& buffer() const noexcept { return buffer_; }
  const std::optional<TokenGrid>& previous_frame() const noexcept { return previous_; }
  std::size_t frame_counter() const noexcept { return frame_counter_; }
  std::size_t total_evicted() const noexcept { return total_evicted_; }

 private:
  PruneConfig config_;
  std::optional<TokenGrid> previous_;
  std::vector<RetainedToken> buffer_;
  std::size_t frame_counter_ = 0;
  std::size_t total_evicted_ = 0;
};

}  // namespace streamprune
