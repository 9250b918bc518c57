#pragma once

#include <chrono>
#include <cstddef>

#include "streamprune/types.hpp"

namespace streamprune {

using Microseconds = std::chrono::duration<double, std::micro>;

struct SpatialPruneResult {
  BoolGrid drop_mask;  ///< true = pruned
  /// Values the strategy consulted: pre-pruning values for Masked/NA, values
  /// at loop termination for IA/IG, all kNoNeighborRedundancy for None.
  RedundancyGrid redundancy;
  std::size_t iterations = 0;
  Microseconds elapsed{0};
};

/// Pruning candidates: cell (i, j) is selected iff (i + j) is odd. No two
/// selected cells are 4-adjacent.
BoolGrid checkerboard_mask(std::size_t width, std::size_t height);

/// Drops candidates whose adjacent-similarity redundancy strictly exceeds
/// tau_s. Single pass; since candidates are mutually non-adjacent, dropping
/// one never changes another candidate's redundancy.
SpatialPruneResult prune_masked(const TokenGrid& grid, double tau_s);

/// Sequential ablation: repeatedly recompute adjacent redundancy over the
/// retained set and drop the single most redundant retained token (ties go to
/// the smallest row, then column) until the maximum is <= tau_s.
SpatialPruneResult prune_ia(const TokenGrid& grid, double tau_s);

/// As prune_ia with frame-global redundancy in place of the adjacent one.
SpatialPruneResult prune_ig(const TokenGrid& grid, double tau_s);

/// Drops every token whose initial adjacent redundancy exceeds tau_s, with no
/// candidate mask and no update. Can over-prune.
SpatialPruneResult prune_na(const TokenGrid& grid, double tau_s);

/// Dispatch on strategy. Strategy::None drops nothing and computes nothing.
SpatialPruneResult prune_spatial(const TokenGrid& grid, double tau_s, Strategy strategy);

}  // namespace streamprune
