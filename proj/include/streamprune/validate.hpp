#pragma once

#include <span>
#include <string>
#include <vector>

#include "streamprune/pipeline.hpp"
#include "streamprune/stats.hpp"
#include "streamprune/types.hpp"

namespace streamprune {

/// Slack allowed when comparing a recomputed similarity against tau_s.
inline constexpr double kSimilaritySlack = 1e-6;

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;  ///< first violation, empty when passed
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const noexcept;
};

/// Re-derives a run's outputs from its input frames and configuration and
/// checks them: stats arithmetic and counts, retained positions against the
/// recomputed mask union, adjacent retained tokens never similar above tau_s,
/// and (for Masked) that every spatial drop is a parity-1 cell whose
/// redundancy still exceeds tau_s after the other drops.
ValidationReport validate_run(std::span<const TokenGrid> frames, const PruneConfig& config,
                              std::span<const FrameReport> stats,
                              std::span<const TokenPosition> retained);

}  // namespace streamprune
