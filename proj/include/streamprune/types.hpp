#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace streamprune {

/// Token grid geometry. Rows are indexed by i in [0, height), columns by j in
/// [0, width); cells are stored row-major.
struct GridShape {
  std::size_t width = 0;
  std::size_t height = 0;

  constexpr std::size_t cells() const noexcept { return width * height; }
  constexpr std::size_t index(std::size_t row, std::size_t col) const noexcept {
    return row * width + col;
  }
  friend constexpr bool operator==(const GridShape&, const GridShape&) = default;
};

/// One frame of video tokens: W x H cells of D-dimensional float embeddings.
///
/// Immutable after construction. Storage is shared between copies, so passing
/// frames by value is cheap and safe across threads.
class TokenGrid {
 public:
  /// Validates shape and finiteness. Throws Error{ShapeMismatch} when
  /// data.size() != width * height * dim or any extent is zero, and
  /// Error{NonFiniteValue} on NaN/Inf.
  static TokenGrid make(std::size_t width, std::size_t height, std::size_t dim,
                        std::vector<float> data);

  std::size_t width() const noexcept { return shape_.width; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t dim() const noexcept { return dim_; }
  GridShape shape() const noexcept { return shape_; }
  std::size_t token_count() const noexcept { return shape_.cells(); }

  std::span<const float> data() const noexcept { return *data_; }
  std::span<const float> token(std::size_t index) const noexcept {
    return data().subspan(index * dim_, dim_);
  }
  std::span<const float> token(std::size_t row, std::size_t col) const noexcept {
    return token(shape_.index(row, col));
  }

  /// Same W, H and D.
  bool same_layout(const TokenGrid& other) const noexcept {
    return shape_ == other.shape_ && dim_ == other.dim_;
  }

 private:
  TokenGrid(GridShape shape, std::size_t dim,
            std::shared_ptr<const std::vector<float>> data)
      : shape_(shape), dim_(dim), data_(std::move(data)) {}

  GridShape shape_;
  std::size_t dim_;
  std::shared_ptr<const std::vector<float>> data_;
};

inline TokenGrid make_token_grid(std::size_t width, std::size_t height,
                                 std::size_t dim, std::vector<float> data) {
  return TokenGrid::make(width, height, dim, std::move(data));
}

/// W x H boolean mask; true means "drop" for pruning masks and "keep" for
/// retention masks, as documented at each use.
class BoolGrid {
 public:
  BoolGrid() = default;
  explicit BoolGrid(GridShape shape, bool fill = false)
      : shape_(shape), bits_(shape.cells(), fill ? 1 : 0) {}

  std::size_t width() const noexcept { return shape_.width; }
  std::size_t height() const noexcept { return shape_.height; }
  GridShape shape() const noexcept { return shape_; }

  bool operator()(std::size_t row, std::size_t col) const noexcept {
    return bits_[shape_.index(row, col)] != 0;
  }
  bool at(std::size_t index) const noexcept { return bits_[index] != 0; }
  void set(std::size_t row, std::size_t col, bool value) noexcept {
    bits_[shape_.index(row, col)] = value ? 1 : 0;
  }
  void set(std::size_t index, bool value) noexcept { bits_[index] = value ? 1 : 0; }

  std::size_t count() const noexcept;
  BoolGrid operator~() const;
  /// Both operands must share a shape (Error{ShapeMismatch} otherwise).
  friend BoolGrid operator|(const BoolGrid& a, const BoolGrid& b);
  friend BoolGrid operator&(const BoolGrid& a, const BoolGrid& b);
  friend bool operator==(const BoolGrid&, const BoolGrid&) = default;

 private:
  GridShape shape_;
  std::vector<std::uint8_t> bits_;
};

/// W x H grid of per-token scalars. Used for redundancy values in [-1, 1] and
/// for temporal cosine distances in [0, 2].
class ScalarGrid {
 public:
  ScalarGrid() = default;
  ScalarGrid(GridShape shape, double fill) : shape_(shape), values_(shape.cells(), fill) {}

  std::size_t width() const noexcept { return shape_.width; }
  std::size_t height() const noexcept { return shape_.height; }
  GridShape shape() const noexcept { return shape_; }

  double operator()(std::size_t row, std::size_t col) const noexcept {
    return values_[shape_.index(row, col)];
  }
  double at(std::size_t index) const noexcept { return values_[index]; }
  double& at(std::size_t index) noexcept { return values_[index]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

using RedundancyGrid = ScalarGrid;
using DistanceGrid = ScalarGrid;

enum class Strategy { Masked, IA, IG, NA, None };

std::string_view to_string(Strategy strategy) noexcept;
/// Accepts the lowercase CLI names: masked, ia, ig, na, none.
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Pruning thresholds and session policy. Defaults are the thresholds used
/// for the main benchmark runs (tau_t = 0.2, tau_s = 0.5).
struct PruneConfig {
  double tau_t = 0.2;  ///< temporal cosine-distance threshold, in [0, 2]
  double tau_s = 0.5;  ///< spatial similarity threshold, in [-1, 1]
  Strategy strategy = Strategy::Masked;
  std::optional<std::size_t> buffer_capacity;  ///< max retained tokens, >= 1

  /// Throws Error{InvalidConfig} naming the offending field.
  void validate() const;
};

void check_tau_s(double tau_s);
void check_tau_t(double tau_t);

}  // namespace streamprune
