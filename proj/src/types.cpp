#include "streamprune/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "streamprune/error.hpp"

namespace streamprune {

TokenGrid TokenGrid::make(std::size_t width, std::size_t height, std::size_t dim,
                          std::vector<float> data) {
  if (width == 0 || height == 0 || dim == 0) {
    throw Error(ErrorCode::ShapeMismatch,
                "grid extents must be positive, got W=" + std::to_string(width) +
                    " H=" + std::to_string(height) + " D=" + std::to_string(dim));
  }
  const std::size_t expected = width * height * dim;
  if (data.size() != expected) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(expected) + " values for W=" +
                    std::to_string(width) + " H=" + std::to_string(height) +
                    " D=" + std::to_string(dim) + ", got " + std::to_string(data.size()));
  }
  const auto bad = std::find_if(data.begin(), data.end(),
                                [](float v) { return !std::isfinite(v); });
  if (bad != data.end()) {
    throw Error(ErrorCode::NonFiniteValue,
                "non-finite value at element " + std::to_string(bad - data.begin()));
  }
  return TokenGrid(GridShape{width, height}, dim,
                   std::make_shared<const std::vector<float>>(std::move(data)));
}

std::size_t BoolGrid::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BoolGrid BoolGrid::operator~() const {
  BoolGrid out(shape_);
  for (std::size_t k = 0; k < bits_.size(); ++k) out.bits_[k] = bits_[k] ? 0 : 1;
  return out;
}

namespace {

template <typename Op>
BoolGrid combine(const BoolGrid& a, const BoolGrid& b, Op op) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::ShapeMismatch, "mask shapes differ");
  }
  BoolGrid out(a.shape());
  for (std::size_t k = 0; k < a.shape().cells(); ++k) out.set(k, op(a.at(k), b.at(k)));
  return out;
}

}  // namespace

BoolGrid operator|(const BoolGrid& a, const BoolGrid& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}

BoolGrid operator&(const BoolGrid& a, const BoolGrid& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Masked: return "masked";
    case Strategy::IA: return "ia";
    case Strategy::IG: return "ig";
    case Strategy::NA: return "na";
    case Strategy::None: return "none";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (auto s : {Strategy::Masked, Strategy::IA, Strategy::IG, Strategy::NA, Strategy::None}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void check_tau_s(double tau_s) {
  if (!(tau_s >= -1.0 && tau_s <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "tau_s must lie in [-1, 1], got " + std::to_string(tau_s));
  }
}

void check_tau_t(double tau_t) {
  if (!(tau_t >= 0.0 && tau_t <= 2.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "tau_t must lie in [0, 2], got " + std::to_string(tau_t));
  }
}

void PruneConfig::validate() const {
  check_tau_t(tau_t);
  check_tau_s(tau_s);
  if (buffer_capacity && *buffer_capacity == 0) {
    throw Error(ErrorCode::InvalidConfig, "buffer_capacity must be at least 1");
  }
}

}  // namespace streamprune
