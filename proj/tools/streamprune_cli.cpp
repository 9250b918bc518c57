// streamprune: drive pruning sessions over token-stream files.
//
//   streamprune run      --input s.stkn --tau-t 0.2 [--tau-s 0.5] [--strategy masked]
//                        [--buffer-capacity N] [--stats out.jsonl] [--retained pos.jsonl]
//   streamprune gen      --kind piecewise --w 14 --h 18 --d 1024 --frames 8 --output s.stkn
//   streamprune bench    --w 14 --h 18 --d 3584 --frames 64 --strategy masked --repeat 4
//   streamprune validate --input s.stkn --tau-t 0.2 --tau-s 0.5 --strategy masked
//                        --stats out.jsonl --retained pos.jsonl
//
// Exit codes: 0 success, 1 validation failure, 2 usage or IO error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamprune/bench.hpp"
#include "streamprune/error.hpp"
#include "streamprune/pipeline.hpp"
#include "streamprune/stats.hpp"
#include "streamprune/stream_io.hpp"
#include "streamprune/synthetic.hpp"
#include "streamprune/validate.hpp"

namespace sp = streamprune;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

const std::map<std::string, sp::Strategy> kStrategies{
    {"masked", sp::Strategy::Masked}, {"ia", sp::Strategy::IA}, {"ig", sp::Strategy::IG},
    {"na", sp::Strategy::NA},         {"none", sp::Strategy::None}};

const std::map<std::string, sp::SyntheticKind> kKinds{
    {"random", sp::SyntheticKind::Random},
    {"static", sp::SyntheticKind::Static},
    {"piecewise", sp::SyntheticKind::Piecewise},
    {"duplicate-patches", sp::SyntheticKind::DuplicatePatches}};

struct PruneFlags {
  double tau_t = 0.2;
  double tau_s = 0.5;
  std::string strategy = "masked";
  std::optional<std::size_t> capacity;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--tau-t", tau_t, "Temporal cosine-distance threshold in [0, 2]")
        ->required()
        ->check(CLI::Range(0.0, 2.0));
    cmd.add_option("--tau-s", tau_s, "Spatial similarity threshold in [-1, 1]")
        ->capture_default_str()
        ->check(CLI::Range(-1.0, 1.0));
    cmd.add_option("--strategy", strategy, "masked|ia|ig|na|none")
        ->capture_default_str()
        ->check(CLI::IsMember(kStrategies));
    cmd.add_option("--buffer-capacity", capacity, "Max retained tokens")
        ->check(CLI::PositiveNumber);
  }

  sp::PruneConfig config() const {
    sp::PruneConfig c;
    c.tau_t = tau_t;
    c.tau_s = tau_s;
    c.strategy = kStrategies.at(strategy);
    c.buffer_capacity = capacity;
    return c;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sp::Error(sp::ErrorCode::IoFailure, "cannot open " + path + " for writing");
  return out;
}

int run_command(const std::string& input, const PruneFlags& flags, const std::string& stats_path,
                const std::string& retained_path) {
  sp::StreamReader reader(input);
  sp::StreamSession session(flags.config());

  std::optional<std::ofstream> stats;
  std::optional<std::ofstream> retained;
  if (!stats_path.empty()) stats = open_output(stats_path);
  if (!retained_path.empty()) retained = open_output(retained_path);

  std::size_t frames = 0, tokens = 0, dropped = 0;
  while (auto frame = reader.next()) {
    const auto result = session.ingest(std::move(*frame));
    const auto& report = result.report;
    if (stats) *stats << sp::to_stats_line(report) << '\n';
    if (retained) {
      const auto& drop = result.drop_mask;
      for (std::size_t row = 0; row < drop.height(); ++row) {
        for (std::size_t col = 0; col < drop.width(); ++col) {
          if (!drop(row, col)) {
            *retained << sp::to_position_line({report.frame_index, row, col}) << '\n';
          }
        }
      }
    }
    ++frames;
    tokens += report.total_tokens;
    dropped += report.dropped_union;
  }
  if (stats && !stats->flush()) throw sp::Error(sp::ErrorCode::IoFailure, "write failed: " + stats_path);
  if (retained && !retained->flush()) {
    throw sp::Error(sp::ErrorCode::IoFailure, "write failed: " + retained_path);
  }

  const double ratio = tokens ? static_cast<double>(dropped) / static_cast<double>(tokens) : 0.0;
  std::printf("frames=%zu tokens=%zu dropped=%zu dropping_ratio=%.4f buffered=%zu evicted=%zu\n",
              frames, tokens, dropped, ratio, session.buffer().size(), session.total_evicted());
  return kExitOk;
}

int validate_command(const std::string& input, const PruneFlags& flags,
                     const std::string& stats_path, const std::string& retained_path) {
  const auto frames = sp::read_stream(input);
  std::ifstream stats_in(stats_path);
  if (!stats_in) throw sp::Error(sp::ErrorCode::IoFailure, "cannot open " + stats_path);
  std::ifstream retained_in(retained_path);
  if (!retained_in) throw sp::Error(sp::ErrorCode::IoFailure, "cannot open " + retained_path);
  const auto stats = sp::read_stats(stats_in);
  const auto retained = sp::read_positions(retained_in);

  const auto report = sp::validate_run(frames, flags.config(), stats, retained);
  for (const auto& check : report.checks) {
    if (check.passed) {
      std::printf("PASS %s\n", check.name.c_str());
    } else {
      std::printf("FAIL %s: %s\n", check.name.c_str(), check.detail.c_str());
    }
  }
  return report.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming video-token pruning"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Ingest a token-stream file through a pruning session");
  std::string run_input, run_stats, run_retained;
  PruneFlags run_flags;
  run->add_option("--input", run_input, "Token-stream file")->required();
  run_flags.add_to(*run);
  run->add_option("--stats", run_stats, "Write per-frame JSONL stats here");
  run->add_option("--retained", run_retained, "Write retained [n, i, j] triples (JSONL) here");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic token stream");
  gen->set_help_flag("--help", "Print this help message and exit");  // --h is the grid height
  sp::SyntheticOptions gen_opts;
  std::string gen_kind = "random", gen_output;
  gen->add_option("--kind", gen_kind, "random|static|piecewise|duplicate-patches")
      ->capture_default_str()
      ->check(CLI::IsMember(kKinds));
  gen->add_option("--w", gen_opts.width)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--h", gen_opts.height)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_opts.dim)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--frames", gen_opts.frames)->capture_default_str();
  gen->add_option("--seed", gen_opts.seed)->capture_default_str();
  gen->add_option("--block", gen_opts.block, "Tile side for piecewise/duplicate-patches")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--noise", gen_opts.noise, "Max per-token noise scale for piecewise")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--output", gen_output, "Destination file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Per-frame pruning latency on synthetic frames");
  bench->set_help_flag("--help", "Print this help message and exit");
  sp::BenchOptions bench_opts;
  std::string bench_strategy = "masked", bench_kind = "random", bench_output;
  bench->add_option("--w", bench_opts.width)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--h", bench_opts.height)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--d", bench_opts.dim)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--frames", bench_opts.frames, "Distinct frames, cycled")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--strategy", bench_strategy, "masked|ia|ig|na|none|all")
      ->capture_default_str()
      ->check(CLI::IsMember({"masked", "ia", "ig", "na", "none", "all"}));
  bench->add_option("--repeat", bench_opts.repeat, "Passes over the frames")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bench_opts.warmup, "Untimed frames before measuring")
      ->capture_default_str();
  bench->add_option("--tau-t", bench_opts.tau_t)->capture_default_str()->check(CLI::Range(0.0, 2.0));
  bench->add_option("--tau-s", bench_opts.tau_s)->capture_default_str()->check(CLI::Range(-1.0, 1.0));
  bench->add_option("--kind", bench_kind)->capture_default_str()->check(CLI::IsMember(kKinds));
  bench->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench->add_option("--block", bench_opts.block)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--noise", bench_opts.noise)->capture_default_str();
  bench->add_option("--output", bench_output, "Also write the JSON summaries here");

  // validate
  auto* validate = app.add_subcommand("validate", "Recheck a run's recorded outputs");
  std::string val_input, val_stats, val_retained;
  PruneFlags val_flags;
  validate->add_option("--input", val_input, "Token-stream file the run consumed")->required();
  val_flags.add_to(*validate);
  validate->add_option("--stats", val_stats, "Stats JSONL written by run")->required();
  validate->add_option("--retained", val_retained, "Retained JSONL written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return run_command(run_input, run_flags, run_stats, run_retained);

    if (*gen) {
      gen_opts.kind = kKinds.at(gen_kind);
      const auto frames = sp::generate_synthetic(gen_opts);
      sp::write_stream(gen_output, frames);
      std::printf("wrote %zu frames (%zux%zux%zu) to %s\n", frames.size(), gen_opts.width,
                  gen_opts.height, gen_opts.dim, gen_output.c_str());
      return kExitOk;
    }

    if (*bench) {
      bench_opts.kind = kKinds.at(bench_kind);
      std::vector<sp::Strategy> strategies;
      if (bench_strategy == "all") {
        for (const auto& [name, s] : kStrategies) strategies.push_back(s);
      } else {
        strategies.push_back(kStrategies.at(bench_strategy));
      }
      std::optional<std::ofstream> out;
      if (!bench_output.empty()) out = open_output(bench_output);
      for (auto s : strategies) {
        bench_opts.strategy = s;
        const std::string line = sp::to_json(sp::bench_latency(bench_opts), bench_opts);
        std::printf("%s\n", line.c_str());
        if (out) *out << line << '\n';
      }
      return kExitOk;
    }

    if (*validate) return validate_command(val_input, val_flags, val_stats, val_retained);
  } catch (const sp::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
