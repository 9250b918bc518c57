#include "streamprune/validate.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "streamprune/redundancy.hpp"
#include "streamprune/spatial.hpp"
#include "streamprune/temporal.hpp"

namespace streamprune {

bool ValidationReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

namespace {

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }

  // Records the first violation only.
  template <typename... Parts>
  void fail(const Parts&... parts) {
    if (!check_.passed) return;
    check_.passed = false;
    std::ostringstream os;
    (os << ... << parts);
    check_.detail = os.str();
  }

  ValidationCheck done() && { return std::move(check_); }

 private:
  ValidationCheck check_;
};

std::string at(std::size_t n, std::size_t i, std::size_t j) {
  return "(" + std::to_string(n) + "," + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

ValidationReport validate_run(std::span<const TokenGrid> frames, const PruneConfig& config,
                              std::span<const FrameReport> stats,
                              std::span<const TokenPosition> retained) {
  config.validate();
  ValidationReport report;

  CheckBuilder count_check("stats.frame_count");
  if (stats.size() != frames.size()) {
    count_check.fail(stats.size(), " stats records for ", frames.size(), " frames");
  }
  for (std::size_t f = 0; f < stats.size(); ++f) {
    if (stats[f].frame_index != f) count_check.fail("record ", f, " has frame ", stats[f].frame_index);
  }
  report.checks.push_back(std::move(count_check).done());

  CheckBuilder arithmetic("stats.arithmetic");
  for (std::size_t f = 0; f < stats.size(); ++f) {
    if (!report_is_consistent(stats[f])) arithmetic.fail("record ", f, " is inconsistent");
    if (f < frames.size() && stats[f].total_tokens != frames[f].token_count()) {
      arithmetic.fail("record ", f, " total ", stats[f].total_tokens, " != ",
                      frames[f].token_count());
    }
  }
  report.checks.push_back(std::move(arithmetic).done());

  CheckBuilder ordering("retained.ordering");
  for (std::size_t k = 0; k < retained.size(); ++k) {
    const auto& p = retained[k];
    if (p[0] >= frames.size() || p[1] >= frames[p[0]].height() || p[2] >= frames[p[0]].width()) {
      ordering.fail("position ", at(p[0], p[1], p[2]), " out of range");
    } else if (k > 0 && !(retained[k - 1] < p)) {
      ordering.fail("position ", at(p[0], p[1], p[2]), " not after its predecessor");
    }
  }
  auto ordering_result = std::move(ordering).done();
  const bool positions_ok = ordering_result.passed;
  report.checks.push_back(std::move(ordering_result));

  CheckBuilder recount("stats.recomputed_counts");
  CheckBuilder union_check("retained.mask_union");
  CheckBuilder temporal_check("retained.temporal");
  CheckBuilder adjacent_check("retained.adjacent_similarity");
  CheckBuilder parity_check("masked.parity");
  CheckBuilder over_pruning("masked.no_over_pruning");

  std::size_t cursor = 0;
  std::optional<TokenGrid> previous;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const TokenGrid& frame = frames[f];
    const auto temporal = prune_temporal(frame, previous, config.tau_t);
    const auto spatial = prune_spatial(frame, config.tau_s, config.strategy);
    const BoolGrid drop = temporal.drop_mask | spatial.drop_mask;

    if (f < stats.size()) {
      const auto& r = stats[f];
      if (r.temporal_dropped != temporal.drop_mask.count() ||
          r.spatial_dropped != spatial.drop_mask.count() || r.dropped_union != drop.count()) {
        recount.fail("frame ", f, " counts differ from recomputation");
      }
    }

    BoolGrid kept(frame.shape());
    if (positions_ok) {
      while (cursor < retained.size() && retained[cursor][0] == f) {
        kept.set(retained[cursor][1], retained[cursor][2], true);
        ++cursor;
      }
    }
    // Eviction can only remove tokens, so with a capacity the buffer is a
    // subset of the admitted set.
    if (!config.buffer_capacity && kept != ~drop) {
      union_check.fail("frame ", f, " retained set differs from ~(Mt | Ms)");
    }
    if (config.buffer_capacity && (kept & drop).count() != 0) {
      union_check.fail("frame ", f, " retains tokens inside Mt | Ms");
    }

    const auto norms = token_norms(frame);
    for (std::size_t row = 0; row < frame.height(); ++row) {
      for (std::size_t col = 0; col < frame.width(); ++col) {
        if (!kept(row, col)) continue;
        const std::size_t k = frame.shape().index(row, col);
        if (temporal.distances.at(k) < config.tau_t) {
          temporal_check.fail("retained ", at(f, row, col), " has distance ",
                              temporal.distances.at(k), " < tau_t");
        }
        if (config.strategy == Strategy::None) continue;
        if (col + 1 < frame.width() && kept(row, col + 1)) {
          const double s = token_similarity(frame, norms, k, k + 1);
          if (s > config.tau_s + kSimilaritySlack) {
            adjacent_check.fail(at(f, row, col), " and right neighbor have similarity ", s);
          }
        }
        if (row + 1 < frame.height() && kept(row + 1, col)) {
          const double s = token_similarity(frame, norms, k, k + frame.width());
          if (s > config.tau_s + kSimilaritySlack) {
            adjacent_check.fail(at(f, row, col), " and lower neighbor have similarity ", s);
          }
        }
      }
    }

    if (config.strategy == Strategy::Masked) {
      // Tokens dropped without being temporally redundant must be spatial
      // drops; each must stay redundant once the others are gone.
      BoolGrid spatial_only(frame.shape());
      for (std::size_t k = 0; k < frame.token_count(); ++k) {
        const bool gone = config.buffer_capacity ? spatial.drop_mask.at(k) : !kept.at(k);
        spatial_only.set(k, gone && !temporal.drop_mask.at(k));
      }
      const auto after = mssavt_over_retained(frame, ~spatial_only);
      for (std::size_t row = 0; row < frame.height(); ++row) {
        for (std::size_t col = 0; col < frame.width(); ++col) {
          if (!spatial_only(row, col)) continue;
          if ((row + col) % 2 != 1) parity_check.fail(at(f, row, col), " dropped on parity 0");
          if (!(after(row, col) > config.tau_s)) {
            over_pruning.fail(at(f, row, col), " has redundancy ", after(row, col),
                              " <= tau_s after the other drops");
          }
        }
      }
    }
    previous = frame;
  }

  if (config.buffer_capacity && retained.size() > *config.buffer_capacity) {
    union_check.fail(retained.size(), " retained tokens exceed capacity ", *config.buffer_capacity);
  }
  report.checks.push_back(std::move(recount).done());
  report.checks.push_back(std::move(union_check).done());
  report.checks.push_back(std::move(temporal_check).done());
  if (config.strategy != Strategy::None) report.checks.push_back(std::move(adjacent_check).done());
  if (config.strategy == Strategy::Masked) {
    report.checks.push_back(std::move(parity_check).done());
    report.checks.push_back(std::move(over_pruning).done());
  }
  return report;
}

}  // namespace streamprune
