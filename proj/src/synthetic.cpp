#include "streamprune/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace streamprune {

std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::Random: return "random";
    case SyntheticKind::Static: return "static";
    case SyntheticKind::Piecewise: return "piecewise";
    case SyntheticKind::DuplicatePatches: return "duplicate-patches";
  }
  return "unknown";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) noexcept {
  for (auto k : {SyntheticKind::Random, SyntheticKind::Static, SyntheticKind::Piecewise,
                 SyntheticKind::DuplicatePatches}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

class Generator {
 public:
  Generator(std::uint64_t seed, std::size_t dim) : rng_(seed), dim_(dim) {}

  std::vector<double> gaussian() {
    std::vector<double> v(dim_);
    for (auto& x : v) x = normal_(rng_);
    return v;
  }

  double uniform(double hi) { return std::uniform_real_distribution<double>(0.0, hi)(rng_); }

  void emit_normalized(const std::vector<double>& v, std::vector<float>& out) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
    for (double x : v) out.push_back(static_cast<float>(x * inv));
  }

  std::vector<float> random_frame(std::size_t tokens) {
    std::vector<float> data;
    data.reserve(tokens * dim_);
    for (std::size_t t = 0; t < tokens; ++t) emit_normalized(gaussian(), data);
    return data;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::size_t dim_;
};

std::vector<float> piecewise_frame(Generator& gen, const SyntheticOptions& o) {
  const std::size_t block = std::max<std::size_t>(o.block, 1);
  const std::size_t block_rows = (o.height + block - 1) / block;
  const std::size_t block_cols = (o.width + block - 1) / block;
  std::vector<std::vector<double>> bases;
  bases.reserve(block_rows * block_cols);
  for (std::size_t b = 0; b < block_rows * block_cols; ++b) {
    auto base = gen.gaussian();
    double sq = 0.0;
    for (double x : base) sq += x * x;
    for (double& x : base) x /= std::sqrt(sq);
    bases.push_back(std::move(base));
  }

  const double per_dim = 1.0 / std::sqrt(static_cast<double>(o.dim));
  std::vector<float> data;
  data.reserve(o.width * o.height * o.dim);
  for (std::size_t row = 0; row < o.height; ++row) {
    for (std::size_t col = 0; col < o.width; ++col) {
      const auto& base = bases[(row / block) * block_cols + col / block];
      const double scale = gen.uniform(o.noise) * per_dim;
      auto v = gen.gaussian();
      for (std::size_t d = 0; d < o.dim; ++d) v[d] = base[d] + scale * v[d];
      gen.emit_normalized(v, data);
    }
  }
  return data;
}

std::vector<float> duplicate_patch_frame(Generator& gen, const SyntheticOptions& o) {
  auto data = gen.random_frame(o.width * o.height);
  // Largest block <= o.block whose copy at the opposite corner leaves at
  // least one row or column of gap from the original.
  std::size_t b = std::min({std::max<std::size_t>(o.block, 1), o.height, o.width});
  while (b > 0 && !(o.height >= 2 * b + 1 || o.width >= 2 * b + 1)) --b;
  if (b == 0) return data;
  const std::size_t row0 = o.height - b;
  const std::size_t col0 = o.width - b;
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < b; ++c) {
      const std::size_t src = (r * o.width + c) * o.dim;
      const std::size_t dst = ((row0 + r) * o.width + col0 + c) * o.dim;
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(src), o.dim,
                  data.begin() + static_cast<std::ptrdiff_t>(dst));
    }
  }
  return data;
}

}  // namespace

std::vector<TokenGrid> generate_synthetic(const SyntheticOptions& o) {
  Generator gen(o.seed, o.dim);
  const std::size_t tokens = o.width * o.height;
  std::vector<TokenGrid> frames;
  frames.reserve(o.frames);
  for (std::size_t f = 0; f < o.frames; ++f) {
    switch (o.kind) {
      case SyntheticKind::Random:
        frames.push_back(TokenGrid::make(o.width, o.height, o.dim, gen.random_frame(tokens)));
        break;
      case SyntheticKind::Static:
        frames.push_back(f == 0 ? TokenGrid::make(o.width, o.height, o.dim,
                                                  gen.random_frame(tokens))
                                : frames.front());
        break;
      case SyntheticKind::Piecewise:
        frames.push_back(TokenGrid::make(o.width, o.height, o.dim, piecewise_frame(gen, o)));
        break;
      case SyntheticKind::DuplicatePatches:
        frames.push_back(
            TokenGrid::make(o.width, o.height, o.dim, duplicate_patch_frame(gen, o)));
        break;
    }
  }
  return frames;
}

}  // namespace streamprune
