#include "streamprune/spatial.hpp"

#include <chrono>

#include "streamprune/redundancy.hpp"

namespace streamprune {

namespace {

using Clock = std::chrono::steady_clock;

Microseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<Microseconds>(Clock::now() - start);
}

// Index of the retained cell with the largest value (first in row-major order
// on ties), or npos when nothing is retained.
std::size_t most_redundant(const RedundancyGrid& redundancy, const BoolGrid& retained) {
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < retained.shape().cells(); ++k) {
    if (!retained.at(k)) continue;
    if (best == static_cast<std::size_t>(-1) || redundancy.at(k) > redundancy.at(best)) best = k;
  }
  return best;
}

// Sequential prune-and-update loop shared by IA and IG. `update` recomputes
// redundancy over the current retained set.
template <typename Update>
SpatialPruneResult prune_sequential(const TokenGrid& grid, double tau_s, Update update,
                                    Clock::time_point start) {
  BoolGrid retained(grid.shape(), true);
  SpatialPruneResult result;
  std::size_t pruned = 0;
  for (;;) {
    result.redundancy = update(retained);
    const std::size_t best = most_redundant(result.redundancy, retained);
    if (best == static_cast<std::size_t>(-1) || !(result.redundancy.at(best) > tau_s)) break;
    retained.set(best, false);
    ++pruned;
  }
  result.drop_mask = ~retained;
  result.iterations = pruned + 1;
  result.elapsed = since(start);
  return result;
}

}  // namespace

BoolGrid checkerboard_mask(std::size_t width, std::size_t height) {
  BoolGrid mask(GridShape{width, height});
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      mask.set(row, col, (row + col) % 2 == 1);
    }
  }
  return mask;
}

SpatialPruneResult prune_masked(const TokenGrid& grid, double tau_s) {
  check_tau_s(tau_s);
  const auto start = Clock::now();
  SpatialPruneResult result;
  result.redundancy = mssavt(grid);
  result.drop_mask = BoolGrid(grid.shape());
  for (std::size_t row = 0; row < grid.height(); ++row) {
    for (std::size_t col = 0; col < grid.width(); ++col) {
      if ((row + col) % 2 == 1 && result.redundancy(row, col) > tau_s) {
        result.drop_mask.set(row, col, true);
      }
    }
  }
  result.iterations = 1;
  result.elapsed = since(start);
  return result;
}

SpatialPruneResult prune_ia(const TokenGrid& grid, double tau_s) {
  check_tau_s(tau_s);
  const auto start = Clock::now();
  const auto norms = token_norms(grid);
  // Every iteration recomputes the adjacent similarities of the retained set
  // from the embeddings, so cost grows with the number of pruned tokens.
  return prune_sequential(
      grid, tau_s,
      [&](const BoolGrid& retained) { return detail::adjacent_max(grid, norms, &retained); },
      start);
}

SpatialPruneResult prune_ig(const TokenGrid& grid, double tau_s) {
  check_tau_s(tau_s);
  const auto start = Clock::now();
  const auto norms = token_norms(grid);
  const auto sims = detail::pairwise_similarity(grid, norms);
  const std::size_t n = grid.token_count();
  return prune_sequential(
      grid, tau_s,
      [&](const BoolGrid& retained) {
        RedundancyGrid out(grid.shape(), kNoNeighborRedundancy);
        for (std::size_t a = 0; a < n; ++a) {
          double best = kNoNeighborRedundancy;
          for (std::size_t b = 0; b < n; ++b) {
            if (b != a && retained.at(b) && sims[a * n + b] > best) best = sims[a * n + b];
          }
          out.at(a) = best;
        }
        return out;
      },
      start);
}

SpatialPruneResult prune_na(const TokenGrid& grid, double tau_s) {
  check_tau_s(tau_s);
  const auto start = Clock::now();
  SpatialPruneResult result;
  result.redundancy = mssavt(grid);
  result.drop_mask = BoolGrid(grid.shape());
  for (std::size_t k = 0; k < grid.token_count(); ++k) {
    result.drop_mask.set(k, result.redundancy.at(k) > tau_s);
  }
  result.iterations = 1;
  result.elapsed = since(start);
  return result;
}

SpatialPruneResult prune_spatial(const TokenGrid& grid, double tau_s, Strategy strategy) {
  switch (strategy) {
    case Strategy::Masked: return prune_masked(grid, tau_s);
    case Strategy::IA: return prune_ia(grid, tau_s);
    case Strategy::IG: return prune_ig(grid, tau_s);
    case Strategy::NA: return prune_na(grid, tau_s);
    case Strategy::None: break;
  }
  check_tau_s(tau_s);
  SpatialPruneResult result;
  result.drop_mask = BoolGrid(grid.shape());
  result.redundancy = RedundancyGrid(grid.shape(), kNoNeighborRedundancy);
  return result;
}

}  // namespace streamprune
