#include "streamprune/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <tuple>

#include "streamprune/error.hpp"
#include "streamprune/redundancy.hpp"

namespace streamprune {

std::vector<RetainedToken> evict_most_redundant(std::vector<RetainedToken>& buffer,
                                                std::size_t capacity) {
  if (buffer.size() <= capacity) return {};
  const std::size_t excess = buffer.size() - capacity;

  auto evicted_first = [&buffer](std::size_t a, std::size_t b) {
    const auto& x = buffer[a];
    const auto& y = buffer[b];
    if (x.admission_redundancy != y.admission_redundancy) {
      return x.admission_redundancy > y.admission_redundancy;
    }
    return std::tie(x.frame_index, x.row, x.col) < std::tie(y.frame_index, y.row, y.col);
  };

  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(excess - 1),
                   order.end(), evicted_first);
  order.resize(excess);
  std::sort(order.begin(), order.end(), evicted_first);

  std::vector<std::uint8_t> doomed(buffer.size(), 0);
  std::vector<RetainedToken> evicted;
  evicted.reserve(excess);
  for (std::size_t idx : order) {
    doomed[idx] = 1;
    evicted.push_back(buffer[idx]);
  }
  std::size_t write = 0;
  for (std::size_t read = 0; read < buffer.size(); ++read) {
    if (doomed[read]) continue;
    if (write != read) buffer[write] = std::move(buffer[read]);
    ++write;
  }
  buffer.resize(write);
  return evicted;
}

StreamSession::StreamSession(PruneConfig config) : config_(config) { config_.validate(); }

FrameResult StreamSession::ingest(TokenGrid frame) {
  if (previous_ && !frame.same_layout(*previous_)) {
    throw Error(ErrorCode::ShapeMismatch,
                "frame " + std::to_string(frame_counter_) + " is " +
                    std::to_string(frame.width()) + "x" + std::to_string(frame.height()) + "x" +
                    std::to_string(frame.dim()) + ", stream is " +
                    std::to_string(previous_->width()) + "x" +
                    std::to_string(previous_->height()) + "x" + std::to_string(previous_->dim()));
  }

  const auto start = std::chrono::steady_clock::now();
  auto temporal = prune_temporal(frame, previous_, config_.tau_t);
  auto spatial = prune_spatial(frame, config_.tau_s, config_.strategy);
  BoolGrid drop = temporal.drop_mask | spatial.drop_mask;
  const auto stop = std::chrono::steady_clock::now();

  // Without a spatial strategy, buffered tokens still carry their adjacent
  // redundancy for eviction.
  const RedundancyGrid admission =
      config_.strategy == Strategy::None ? mssavt(frame) : std::move(spatial.redundancy);

  const GridShape shape = frame.shape();
  for (std::size_t row = 0; row < shape.height; ++row) {
    for (std::size_t col = 0; col < shape.width; ++col) {
      if (drop(row, col)) continue;
      const auto token = frame.token(row, col);
      buffer_.push_back(RetainedToken{frame_counter_, row, col,
                                      std::vector<float>(token.begin(), token.end()),
                                      admission(row, col)});
    }
  }

  FrameResult result;
  FrameReport& report = result.report;
  report.frame_index = frame_counter_;
  report.total_tokens = shape.cells();
  report.temporal_dropped = temporal.drop_mask.count();
  report.spatial_dropped = spatial.drop_mask.count();
  report.dropped_union = drop.count();
  report.retained = report.total_tokens - report.dropped_union;
  report.dropping_ratio =
      static_cast<double>(report.dropped_union) / static_cast<double>(report.total_tokens);
  report.latency_us = std::chrono::duration<double, std::micro>(stop - start).count();

  result.temporal_mask = std::move(temporal.drop_mask);
  result.spatial_mask = std::move(spatial.drop_mask);
  result.drop_mask = std::move(drop);

  previous_ = std::move(frame);
  ++frame_counter_;
  evict_if_full();
  return result;
}

std::size_t StreamSession::evict_if_full() {
  if (!config_.buffer_capacity) return 0;
  const std::size_t n = evict_most_redundant(buffer_, *config_.buffer_capacity).size();
  total_evicted_ += n;
  return n;
}

std::vector<RetainedToken> StreamSession::assemble_query_context() const {
  std::vector<RetainedToken> out = buffer_;
  std::sort(out.begin(), out.end(), [](const RetainedToken& a, const RetainedToken& b) {
    return std::tie(a.frame_index, a.row, a.col) < std::tie(b.frame_index, b.row, b.col);
  });
  return out;
}

}  // namespace streamprune
