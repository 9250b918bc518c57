#pragma once

#include <optional>

#include "streamprune/spatial.hpp"
#include "streamprune/types.hpp"

namespace streamprune {

struct TemporalPruneResult {
  BoolGrid drop_mask;     ///< true = temporally redundant
  DistanceGrid distances; ///< 1 - cos(current, previous) per cell, in [0, 2]
  Microseconds elapsed{0};
};

/// Same-position temporal redundancy against the previous raw frame.
///
/// A token is dropped when its cosine distance to the token at the same
/// position in `previous` is strictly below tau_t. Without a previous frame
/// nothing is dropped and every distance is 2. This stands in for a full
/// temporal-dropping algorithm behind the same interface.
TemporalPruneResult prune_temporal(const TokenGrid& current,
                                   const std::optional<TokenGrid>& previous,
                                   double tau_t);

}  // namespace streamprune
