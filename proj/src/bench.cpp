#include "streamprune/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "streamprune/spatial.hpp"
#include "streamprune/temporal.hpp"

namespace streamprune {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double rank = std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return samples[std::min(idx, samples.size() - 1)];
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void digest_mask(std::uint64_t& h, const BoolGrid& mask) {
  for (std::size_t k = 0; k < mask.shape().cells(); ++k) {
    h ^= mask.at(k) ? 1u : 0u;
    h *= kFnvPrime;
  }
}

}  // namespace

LatencySummary bench_frames(std::span<const TokenGrid> frames, Strategy strategy, double tau_t,
                            double tau_s, std::size_t repeat, std::size_t warmup) {
  check_tau_t(tau_t);
  check_tau_s(tau_s);
  LatencySummary summary;
  summary.strategy = strategy;
  if (frames.empty()) return summary;

  const std::size_t n = frames.size();
  auto predecessor = [&](std::size_t f) -> std::optional<TokenGrid> {
    if (n == 1) return std::nullopt;
    return frames[(f + n - 1) % n];
  };

  for (std::size_t w = 0; w < warmup; ++w) {
    const std::size_t f = w % n;
    (void)prune_temporal(frames[f], predecessor(f), tau_t);
    (void)prune_spatial(frames[f], tau_s, strategy);
  }

  std::vector<double> samples;
  samples.reserve(n * repeat);
  std::size_t tokens = 0, temporal_dropped = 0, spatial_dropped = 0, dropped = 0;

  for (std::size_t r = 0; r < repeat; ++r) {
    std::uint64_t digest = kFnvOffset;
    for (std::size_t f = 0; f < n; ++f) {
      const auto previous = predecessor(f);
      const auto start = std::chrono::steady_clock::now();
      const auto temporal = prune_temporal(frames[f], previous, tau_t);
      const auto spatial = prune_spatial(frames[f], tau_s, strategy);
      const BoolGrid drop = temporal.drop_mask | spatial.drop_mask;
      const auto stop = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double, std::micro>(stop - start).count());

      digest_mask(digest, drop);
      if (r == 0) {
        tokens += frames[f].token_count();
        temporal_dropped += temporal.drop_mask.count();
        spatial_dropped += spatial.drop_mask.count();
        dropped += drop.count();
      }
    }
    summary.mask_digests.push_back(digest);
  }

  summary.samples = samples.size();
  if (!samples.empty()) {
    summary.median_us = percentile(samples, 0.5);
    summary.p95_us = percentile(samples, 0.95);
    summary.mean_us =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    summary.min_us = *lo;
    summary.max_us = *hi;
  }
  summary.samples_us = std::move(samples);
  if (tokens > 0) {
    const auto t = static_cast<double>(tokens);
    summary.temporal_dropping_ratio = static_cast<double>(temporal_dropped) / t;
    summary.spatial_dropping_ratio = static_cast<double>(spatial_dropped) / t;
    summary.dropping_ratio = static_cast<double>(dropped) / t;
  }
  return summary;
}

LatencySummary bench_latency(const BenchOptions& o) {
  SyntheticOptions gen;
  gen.kind = o.kind;
  gen.width = o.width;
  gen.height = o.height;
  gen.dim = o.dim;
  gen.frames = o.frames;
  gen.seed = o.seed;
  gen.block = o.block;
  gen.noise = o.noise;
  const auto frames = generate_synthetic(gen);
  return bench_frames(frames, o.strategy, o.tau_t, o.tau_s, o.repeat, o.warmup);
}

std::string to_json(const LatencySummary& s, const BenchOptions& o) {
  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(s.strategy));
  j["w"] = o.width;
  j["h"] = o.height;
  j["d"] = o.dim;
  j["frames"] = o.frames;
  j["repeat"] = o.repeat;
  j["kind"] = std::string(to_string(o.kind));
  j["tau_t"] = o.tau_t;
  j["tau_s"] = o.tau_s;
  j["samples"] = s.samples;
  j["median_us"] = s.median_us;
  j["p95_us"] = s.p95_us;
  j["mean_us"] = s.mean_us;
  j["min_us"] = s.min_us;
  j["max_us"] = s.max_us;
  j["temporal_dropping_ratio"] = s.temporal_dropping_ratio;
  j["spatial_dropping_ratio"] = s.spatial_dropping_ratio;
  j["dropping_ratio"] = s.dropping_ratio;
  j["mask_digests"] = s.mask_digests;
  return j.dump();
}

}  // namespace streamprune
