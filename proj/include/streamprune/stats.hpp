#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "streamprune/pipeline.hpp"

namespace streamprune {

/// One JSON object per line with keys, in order: frame, total,
/// temporal_dropped, spatial_dropped, dropped_union, retained,
/// dropping_ratio, latency_us.
std::string to_stats_line(const FrameReport& report);
FrameReport parse_stats_line(std::string_view line);
std::vector<FrameReport> read_stats(std::istream& in);

/// (frame, row, col)
using TokenPosition = std::array<std::size_t, 3>;

/// One `[n, i, j]` array per line.
std::string to_position_line(const TokenPosition& position);
std::vector<TokenPosition> read_positions(std::istream& in);

/// Arithmetic invariants of a report: retained = total - dropped_union,
/// dropped_union <= temporal + spatial, ratio = dropped_union / total.
bool report_is_consistent(const FrameReport& report) noexcept;

}  // namespace streamprune
