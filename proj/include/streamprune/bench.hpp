#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "streamprune/synthetic.hpp"
#include "streamprune/types.hpp"

namespace streamprune {

struct BenchOptions {
  std::size_t width = 14;
  std::size_t height = 18;
  std::size_t dim = 1024;
  std::size_t frames = 64;  ///< distinct frames generated and cycled through
  Strategy strategy = Strategy::Masked;
  std::size_t repeat = 1;   ///< passes over the frame pool
  std::size_t warmup = 8;   ///< frames processed before timing, discarded
  double tau_t = 0.2;
  double tau_s = 0.5;
  SyntheticKind kind = SyntheticKind::Random;
  std::uint64_t seed = 0;
  std::size_t block = 3;
  double noise = 1.0;
};

/// Per-frame latency of temporal + spatial pruning and the mask union. File
/// IO, generation and serialization are outside the timed region.
struct LatencySummary {
  Strategy strategy = Strategy::Masked;
  std::size_t samples = 0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double mean_us = 0.0;
  double min_us = 0.0;
  double max_us = 0.0;
  double temporal_dropping_ratio = 0.0;
  double spatial_dropping_ratio = 0.0;
  double dropping_ratio = 0.0;
  /// FNV-1a over every frame's final drop mask, one per repeat. Equal digests
  /// mean identical pruning outputs.
  std::vector<std::uint64_t> mask_digests;
  std::vector<double> samples_us;  ///< per-frame latencies in timing order
};

/// Frame k is compared against frame k-1 (cyclically; a single frame has no
/// predecessor). Every repeat sees the same frame/predecessor pairs.
LatencySummary bench_frames(std::span<const TokenGrid> frames, Strategy strategy,
                            double tau_t, double tau_s, std::size_t repeat = 1,
                            std::size_t warmup = 8);

LatencySummary bench_latency(const BenchOptions& options);

/// Nearest-rank percentile, q in [0, 1]. Empty input yields 0.
double percentile(std::vector<double> samples, double q);

std::string to_json(const LatencySummary& summary, const BenchOptions& options);

}  // namespace streamprune
