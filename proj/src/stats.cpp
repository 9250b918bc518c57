#include "streamprune/stats.hpp"

#include <cmath>
#include <istream>
#include <string>

#include <json.hpp>

#include "streamprune/error.hpp"

namespace streamprune {

using ordered_json = nlohmann::ordered_json;

std::string to_stats_line(const FrameReport& r) {
  ordered_json j;
  j["frame"] = r.frame_index;
  j["total"] = r.total_tokens;
  j["temporal_dropped"] = r.temporal_dropped;
  j["spatial_dropped"] = r.spatial_dropped;
  j["dropped_union"] = r.dropped_union;
  j["retained"] = r.retained;
  j["dropping_ratio"] = r.dropping_ratio;
  j["latency_us"] = r.latency_us;
  return j.dump();
}

FrameReport parse_stats_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    FrameReport r;
    r.frame_index = j.at("frame").get<std::size_t>();
    r.total_tokens = j.at("total").get<std::size_t>();
    r.temporal_dropped = j.at("temporal_dropped").get<std::size_t>();
    r.spatial_dropped = j.at("spatial_dropped").get<std::size_t>();
    r.dropped_union = j.at("dropped_union").get<std::size_t>();
    r.retained = j.at("retained").get<std::size_t>();
    r.dropping_ratio = j.at("dropping_ratio").get<double>();
    r.latency_us = j.at("latency_us").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("bad stats record: ") + e.what());
  }
}

std::vector<FrameReport> read_stats(std::istream& in) {
  std::vector<FrameReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_stats_line(line));
  }
  return out;
}

std::string to_position_line(const TokenPosition& p) {
  return ordered_json::array({p[0], p[1], p[2]}).dump();
}

std::vector<TokenPosition> read_positions(std::istream& in) {
  std::vector<TokenPosition> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::IoFailure, "position record is not an [n, i, j] triple: " + line);
      }
      out.push_back({j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::IoFailure, std::string("bad position record: ") + e.what());
    }
  }
  return out;
}

bool report_is_consistent(const FrameReport& r) noexcept {
  if (r.total_tokens == 0) return false;
  if (r.dropped_union > r.total_tokens) return false;
  if (r.retained != r.total_tokens - r.dropped_union) return false;
  if (r.dropped_union > r.temporal_dropped + r.spatial_dropped) return false;
  if (r.dropped_union < std::max(r.temporal_dropped, r.spatial_dropped)) return false;
  const double ratio = static_cast<double>(r.dropped_union) / static_cast<double>(r.total_tokens);
  return std::abs(r.dropping_ratio - ratio) <= 1e-12;
}

}  // namespace streamprune
