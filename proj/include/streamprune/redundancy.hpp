#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "streamprune/types.hpp"

namespace streamprune {

struct NeighborOffset {
  int d_row;
  int d_col;
};

/// The 4-neighborhood consulted by the adjacent-similarity redundancy metric.
inline constexpr std::array<NeighborOffset, 4> kNeighborOffsets{{
    {-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

/// Redundancy assigned to a token with no (retained) neighbor. It is the
/// cosine minimum, so such a token is never prunable for any tau_s >= -1.
inline constexpr double kNoNeighborRedundancy = -1.0;

/// Norms below this are treated as zero vectors.
inline constexpr double kZeroNormEpsilon = 1e-12;

/// Dot product with 32 float lanes widened into per-lane double accumulators
/// every 256 elements. Reduction order is fixed, so results are deterministic and
/// dot(a, b) == dot(b, a) bit for bit.
double dot(std::span<const float> a, std::span<const float> b) noexcept;

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
/// Throws Error{ShapeMismatch} on differing lengths and Error{ZeroVector} when
/// either norm is below kZeroNormEpsilon.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Euclidean norm of every token, row-major.
std::vector<double> token_norms(const TokenGrid& grid);

/// Grid-level similarity between two tokens given precomputed norms. A pair
/// involving a zero-norm token has similarity 0.
double token_similarity(const TokenGrid& grid, std::span<const double> norms,
                        std::size_t a, std::size_t b) noexcept;

/// Max cosine similarity of each token to its in-bounds 4-neighbors.
RedundancyGrid mssavt(const TokenGrid& grid);

/// As mssavt, but the max ranges only over neighbors whose `retained` bit is
/// set. Cells themselves are evaluated whether retained or not.
RedundancyGrid mssavt_over_retained(const TokenGrid& grid, const BoolGrid& retained);

/// Max cosine similarity of each token to any other retained token in the
/// frame, regardless of position.
RedundancyGrid global_redundancy(const TokenGrid& grid, const BoolGrid& retained);

namespace detail {

/// {x0.y0, x1.y1, x2.y2} in one pass; each equals the corresponding dot()
/// bit for bit. All spans must have x0's length.
std::array<double, 3> dot3(std::span<const float> x0, std::span<const float> y0,
                           std::span<const float> x1, std::span<const float> y1,
                           std::span<const float> x2, std::span<const float> y2) noexcept;

/// Shared kernel behind mssavt / mssavt_over_retained. Each adjacent edge is
/// evaluated once; `retained` may be null for "all retained".
RedundancyGrid adjacent_max(const TokenGrid& grid, std::span<const double> norms,
                            const BoolGrid* retained);

/// Dense N x N similarity matrix (diagonal unset). Row-major.
std::vector<double> pairwise_similarity(const TokenGrid& grid,
                                        std::span<const double> norms);

}  // namespace detail

}  // namespace streamprune
