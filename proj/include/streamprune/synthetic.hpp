#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "streamprune/types.hpp"

namespace streamprune {

enum class SyntheticKind {
  Random,            ///< i.i.d. unit-normalized Gaussian tokens, fresh per frame
  Static,            ///< one random frame repeated
  Piecewise,         ///< noisy copies of one base vector per block x block tile
  DuplicatePatches,  ///< random tokens plus two identical, distant blocks
};

std::string_view to_string(SyntheticKind kind) noexcept;
/// Accepts random, static, piecewise, duplicate-patches.
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) noexcept;

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::Random;
  std::size_t width = 14;
  std::size_t height = 18;
  std::size_t dim = 1024;
  std::size_t frames = 8;
  std::uint64_t seed = 0;
  std::size_t block = 3;  ///< tile side for Piecewise / DuplicatePatches
  /// Piecewise: each token is normalize(base + s * g / sqrt(D)) with g
  /// standard normal and s drawn uniformly from [0, noise] per token, so
  /// within-tile similarities spread over a range instead of concentrating.
  double noise = 1.0;
};

/// Deterministic in `options` (same seed, same bits).
std::vector<TokenGrid> generate_synthetic(const SyntheticOptions& options);

}  // namespace streamprune
