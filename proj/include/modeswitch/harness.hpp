#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "modeswitch/envs.hpp"
#include "modeswitch/intrinsic.hpp"
#include "modeswitch/qlearner.hpp"
#include "modeswitch/stats.hpp"
#include "modeswitch/switching.hpp"
#include "modeswitch/varspec.hpp"

namespace modeswitch {

inline constexpr double kSoftExploreEpsilon = 0.4;
inline constexpr double kSoftExploitEpsilon = 0.1;

struct ExperimentConfig {
  VariantSpec variant;
  EnvSpec env = make_env_spec(EnvKind::DeepSea, 10);
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int total_episodes = 1000;
  int eval_every = 50;
  int eval_episodes = 1;
  LearnerConfig learner;
  std::filesystem::path out_dir = "out";

  SignalKind trigger_signal = SignalKind::ValuePromise;
  int top_k = 1;
  bool parallel_seeds = false;
  bool shared_bandit = false;
  bool global_counts = false;
  bool dump_q = false;
  bool record_traces = true;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Flat key=value echo of the resolved configuration; readable back by the
/// CLI's --config option.
std::string config_echo(const ExperimentConfig& config);

struct EvalPoint {
  int episode = 0;  // training episodes completed
  double eval_return = 0.0;
  double normalized_return = 0.0;
};

struct BanditLogRow {
  int episode = 0;
  std::string bandit;
  std::size_t arm = 0;
  double arm_value = 0.0;
  double episodic_return = 0.0;
};

/// One behaviour episode. Rewards and signals are filled only when traces
/// are recorded; the modes are always kept for the statistics.
struct RecordedEpisode {
  EpisodeTrace trace;
  std::vector<double> rewards;
  std::vector<double> signals;
};

struct StatsRow {
  std::string window;
  ExplorationStats stats;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EvalPoint> learning_curve;
  std::vector<RecordedEpisode> episodes;
  std::vector<BanditLogRow> bandit_log;
  std::vector<StatsRow> stats;
  QTable q{1, false, 1, 1};
  VisitCounts counts;

  double final_normalized() const {
    return learning_curve.empty() ? 0.0 : learning_curve.back().normalized_return;
  }
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
};

/// Mean undiscounted return of the extrinsic-head greedy policy. Touches
/// neither the table nor any counts.
double evaluate_greedy(const QTable& q, const EnvSpec& env, int episodes, std::uint64_t seed);

/// Trains every seed in memory (no files written).
ExperimentResult train(const ExperimentConfig& config);

/// Trains and writes, per seed, <out>/seed_<s>/ with learning_curve.csv,
/// traces.csv, stats.csv, bandit_log.csv and config.txt (plus q_table.csv
/// when requested). Returns the output directory.
std::filesystem::path run_experiment(const ExperimentConfig& config);

/// Windowed statistics over first 10%, last 10% and all training episodes.
std::vector<StatsRow> window_stats(const std::vector<RecordedEpisode>& episodes);

void write_learning_curve_csv(std::ostream& os, const SeedResult& r);
void write_traces_csv(std::ostream& os, const SeedResult& r);
void write_stats_csv(std::ostream& os, const SeedResult& r);
void write_bandit_log_csv(std::ostream& os, const SeedResult& r);

}  // namespace modeswitch
