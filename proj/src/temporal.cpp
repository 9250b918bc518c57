#include "streamprune/temporal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "streamprune/error.hpp"
#include "streamprune/redundancy.hpp"

namespace streamprune {

TemporalPruneResult prune_temporal(const TokenGrid& current,
                                   const std::optional<TokenGrid>& previous, double tau_t) {
  check_tau_t(tau_t);
  const auto start = std::chrono::steady_clock::now();
  TemporalPruneResult result;
  result.drop_mask = BoolGrid(current.shape());
  result.distances = DistanceGrid(current.shape(), 2.0);
  if (previous) {
    if (!current.same_layout(*previous)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "previous frame is " + std::to_string(previous->width()) + "x" +
                      std::to_string(previous->height()) + "x" + std::to_string(previous->dim()) +
                      ", current is " + std::to_string(current.width()) + "x" +
                      std::to_string(current.height()) + "x" + std::to_string(current.dim()));
    }
    for (std::size_t k = 0; k < current.token_count(); ++k) {
      const auto a = current.token(k);
      const auto b = previous->token(k);
      const auto dots = detail::dot3(a, a, b, b, a, b);
      const double na = std::sqrt(dots[0]);
      const double nb = std::sqrt(dots[1]);
      double sim = 0.0;
      if (na >= kZeroNormEpsilon && nb >= kZeroNormEpsilon) {
        sim = std::clamp(dots[2] / (na * nb), -1.0, 1.0);
      }
      const double distance = 1.0 - sim;
      result.distances.at(k) = distance;
      result.drop_mask.set(k, distance < tau_t);
    }
  }
  result.elapsed = std::chrono::duration_cast<Microseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace streamprune
