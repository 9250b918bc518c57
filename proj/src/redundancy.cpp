#include "streamprune/redundancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "streamprune/error.hpp"

namespace streamprune {

namespace {

constexpr std::size_t kLanes = 32;
constexpr std::size_t kBlock = 256;

// K dot products x[k].y[k] over the same length n, one pass over memory.
// Products accumulate in float lanes (fused multiply-add) within a block, lanes are widened into
// per-lane double accumulators after each block, and the lanes are summed in
// a fixed order at the end. Each product has its own lanes, so every K agrees
// with K = 1 bit for bit.
template <std::size_t K>
[[gnu::always_inline]] inline void dot_pairs(const std::array<const float*, K>& x,
                                             const std::array<const float*, K>& y,
                                             std::size_t n, std::array<double, K>& out) {
  double wide[K][kLanes] = {};
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) {
    float acc[K][kLanes] = {};
    for (std::size_t k = 0; k < kBlock; k += kLanes) {
      for (std::size_t p = 0; p < K; ++p) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          acc[p][l] = std::fma(x[p][i + k + l], y[p][i + k + l], acc[p][l]);
        }
      }
    }
    for (std::size_t p = 0; p < K; ++p) {
      for (std::size_t l = 0; l < kLanes; ++l) wide[p][l] += double{acc[p][l]};
    }
  }
  for (std::size_t p = 0; p < K; ++p) {
    for (std::size_t width = kLanes / 2; width > 0; width /= 2) {
      for (std::size_t l = 0; l < width; ++l) wide[p][l] += wide[p][l + width];
    }
    out[p] = wide[p][0];
  }
  for (; i < n; ++i) {
    for (std::size_t p = 0; p < K; ++p) out[p] += double{x[p][i]} * double{y[p][i]};
  }
}


// Kernel variants. Lane updates are fused multiply-adds in both: a hardware
// FMA in the AVX2 build, std::fma otherwise. Both are correctly rounded, so
// every variant returns the same bits.
#if defined(__GNUC__) && defined(__x86_64__)
#define STREAMPRUNE_HAS_AVX2_VARIANT 1
[[gnu::target("avx2,fma")]] void dot_pairs1_avx2(const std::array<const float*, 1>& x,
                                                 const std::array<const float*, 1>& y,
                                                 std::size_t n, std::array<double, 1>& out) {
  dot_pairs<1>(x, y, n, out);
}
[[gnu::target("avx2,fma")]] void dot_pairs3_avx2(const std::array<const float*, 3>& x,
                                                 const std::array<const float*, 3>& y,
                                                 std::size_t n, std::array<double, 3>& out) {
  dot_pairs<3>(x, y, n, out);
}
#endif

void dot_pairs1_generic(const std::array<const float*, 1>& x,
                        const std::array<const float*, 1>& y, std::size_t n,
                        std::array<double, 1>& out) {
  dot_pairs<1>(x, y, n, out);
}
void dot_pairs3_generic(const std::array<const float*, 3>& x,
                        const std::array<const float*, 3>& y, std::size_t n,
                        std::array<double, 3>& out) {
  dot_pairs<3>(x, y, n, out);
}

bool use_avx2() noexcept {
#ifdef STREAMPRUNE_HAS_AVX2_VARIANT
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  std::array<double, 1> out;
  const std::array<const float*, 1> x{a.data()};
  const std::array<const float*, 1> y{b.data()};
  const std::size_t n = std::min(a.size(), b.size());
#ifdef STREAMPRUNE_HAS_AVX2_VARIANT
  if (use_avx2()) {
    dot_pairs1_avx2(x, y, n, out);
    return out[0];
  }
#endif
  dot_pairs1_generic(x, y, n, out);
  return out[0];
}

namespace detail {

std::array<double, 3> dot3(std::span<const float> x0, std::span<const float> y0,
                           std::span<const float> x1, std::span<const float> y1,
                           std::span<const float> x2, std::span<const float> y2) noexcept {
  std::array<double, 3> out;
  const std::array<const float*, 3> x{x0.data(), x1.data(), x2.data()};
  const std::array<const float*, 3> y{y0.data(), y1.data(), y2.data()};
#ifdef STREAMPRUNE_HAS_AVX2_VARIANT
  if (use_avx2()) {
    dot_pairs3_avx2(x, y, x0.size(), out);
    return out;
  }
#endif
  dot_pairs3_generic(x, y, x0.size(), out);
  return out;
}

}  // namespace detail

namespace {

double clamp_unit(double v) noexcept { return std::clamp(v, -1.0, 1.0); }

void check_same_shape(const TokenGrid& grid, const BoolGrid& mask) {
  if (grid.shape() != mask.shape()) {
    throw Error(ErrorCode::ShapeMismatch,
                "mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                    " but grid is " + std::to_string(grid.width()) + "x" +
                    std::to_string(grid.height()));
  }
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, "vectors have dimensions " +
                                              std::to_string(a.size()) + " and " +
                                              std::to_string(b.size()));
  }
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na < kZeroNormEpsilon || nb < kZeroNormEpsilon) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero-norm vector");
  }
  return clamp_unit(dot(a, b) / (na * nb));
}

std::vector<double> token_norms(const TokenGrid& grid) {
  std::vector<double> norms(grid.token_count());
  for (std::size_t k = 0; k < norms.size(); ++k) {
    const auto t = grid.token(k);
    norms[k] = std::sqrt(dot(t, t));
  }
  return norms;
}

double token_similarity(const TokenGrid& grid, std::span<const double> norms,
                        std::size_t a, std::size_t b) noexcept {
  const double na = norms[a];
  const double nb = norms[b];
  if (na < kZeroNormEpsilon || nb < kZeroNormEpsilon) return 0.0;
  return clamp_unit(dot(grid.token(a), grid.token(b)) / (na * nb));
}

namespace detail {

RedundancyGrid adjacent_max(const TokenGrid& grid, std::span<const double> norms,
                            const BoolGrid* retained) {
  const GridShape shape = grid.shape();
  RedundancyGrid out(shape, kNoNeighborRedundancy);
  auto kept = [retained](std::size_t k) { return retained == nullptr || retained->at(k); };

  // Each undirected edge is visited once; it raises an endpoint's value only
  // when the opposite endpoint is retained.
  auto relax = [&](std::size_t a, std::size_t b) {
    const bool keep_a = kept(a);
    const bool keep_b = kept(b);
    if (!keep_a && !keep_b) return;
    const double s = token_similarity(grid, norms, a, b);
    if (keep_b) out.at(a) = std::max(out.at(a), s);
    if (keep_a) out.at(b) = std::max(out.at(b), s);
  };

  for (std::size_t row = 0; row < shape.height; ++row) {
    for (std::size_t col = 0; col < shape.width; ++col) {
      const std::size_t k = shape.index(row, col);
      if (col + 1 < shape.width) relax(k, k + 1);
      if (row + 1 < shape.height) relax(k, k + shape.width);
    }
  }
  return out;
}

std::vector<double> pairwise_similarity(const TokenGrid& grid, std::span<const double> norms) {
  const std::size_t n = grid.token_count();
  std::vector<double> sims(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double s = token_similarity(grid, norms, a, b);
      sims[a * n + b] = s;
      sims[b * n + a] = s;
    }
  }
  return sims;
}

}  // namespace detail

RedundancyGrid mssavt(const TokenGrid& grid) {
  // Single sweep: each token's squared norm and its dots with the right and
  // lower neighbors. Similarities use the same formula as token_similarity.
  const GridShape shape = grid.shape();
  const std::size_t n = shape.cells();
  std::vector<double> norms(n), right(n, 0.0), down(n, 0.0);
  for (std::size_t row = 0; row < shape.height; ++row) {
    for (std::size_t col = 0; col < shape.width; ++col) {
      const std::size_t k = shape.index(row, col);
      const auto a = grid.token(k);
      const auto r = col + 1 < shape.width ? grid.token(k + 1) : a;
      const auto d = row + 1 < shape.height ? grid.token(k + shape.width) : a;
      const auto dots = detail::dot3(a, a, a, r, a, d);
      norms[k] = std::sqrt(dots[0]);
      right[k] = dots[1];
      down[k] = dots[2];
    }
  }

  RedundancyGrid out(shape, kNoNeighborRedundancy);
  auto relax = [&](std::size_t a, std::size_t b, double dot_ab) {
    double s = 0.0;
    if (norms[a] >= kZeroNormEpsilon && norms[b] >= kZeroNormEpsilon) {
      s = clamp_unit(dot_ab / (norms[a] * norms[b]));
    }
    out.at(a) = std::max(out.at(a), s);
    out.at(b) = std::max(out.at(b), s);
  };
  for (std::size_t row = 0; row < shape.height; ++row) {
    for (std::size_t col = 0; col < shape.width; ++col) {
      const std::size_t k = shape.index(row, col);
      if (col + 1 < shape.width) relax(k, k + 1, right[k]);
      if (row + 1 < shape.height) relax(k, k + shape.width, down[k]);
    }
  }
  return out;
}

RedundancyGrid mssavt_over_retained(const TokenGrid& grid, const BoolGrid& retained) {
  check_same_shape(grid, retained);
  const auto norms = token_norms(grid);
  return detail::adjacent_max(grid, norms, &retained);
}

RedundancyGrid global_redundancy(const TokenGrid& grid, const BoolGrid& retained) {
  check_same_shape(grid, retained);
  const auto norms = token_norms(grid);
  const std::size_t n = grid.token_count();
  RedundancyGrid out(grid.shape(), kNoNeighborRedundancy);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!retained.at(a) && !retained.at(b)) continue;
      const double s = token_similarity(grid, norms, a, b);
      if (retained.at(b)) out.at(a) = std::max(out.at(a), s);
      if (retained.at(a)) out.at(b) = std::max(out.at(b), s);
    }
  }
  return out;
}

}  // namespace streamprune
