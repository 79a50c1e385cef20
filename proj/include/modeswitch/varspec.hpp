#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modeswitch/switching.hpp"

namespace modeswitch {

// Variant names follow the tuple grammar
//   <mode>-intra(<dur>,<trigger>,<exploit>,<start>)
//   <mode>-step-level-<epsilon>
//   <mode>-episode-level-*
//   <mode>-experiment-level-<X|G>
// e.g. "XU-intra(100,informed,p*,X)".

enum class ModePair { XU, XI, XS };

enum class ExploreDurToken { N1, N10, N100, Bandit, Symmetric };

enum class TriggerType { Blind, Informed };

enum class ExploitParam {
  N10, N100, N1000, N10000,
  P0_1, P0_01, P0_001, P0_0001,
  NBandit, PBandit,
};

struct IntraSpec {
  ExploreDurToken explore_dur = ExploreDurToken::N10;
  TriggerType trigger = TriggerType::Blind;
  ExploitParam exploit = ExploitParam::N100;
  Mode start = Mode::Exploit;

  bool operator==(const IntraSpec&) const = default;
};

struct ExperimentLevelSpec {
  Mode mode = Mode::Exploit;
  bool operator==(const ExperimentLevelSpec&) const = default;
};

struct StepLevelSpec {
  double epsilon = 0.01;
  bool operator==(const StepLevelSpec&) const = default;
};

struct EpisodeLevelSpec {
  bool operator==(const EpisodeLevelSpec&) const = default;
};

using GranularitySpec = std::variant<ExperimentLevelSpec, StepLevelSpec, EpisodeLevelSpec, IntraSpec>;

struct VariantSpec {
  ModePair mode_pair = ModePair::XU;
  GranularitySpec granularity = ExperimentLevelSpec{};

  bool operator==(const VariantSpec&) const = default;
};

/// Throws ParseError naming the offending token and its offset.
VariantSpec parse_variant(std::string_view text);

/// Canonical text; parse_variant(format_variant(s)) == s for every valid s.
std::string format_variant(const VariantSpec& spec);

/// Throws ConfigError for combinations the grammar can express but the
/// method cannot run (informed triggers take target rates, not step counts).
void validate_variant(const VariantSpec& spec);

/// Multi-line, key: value description used by the `parse` command.
std::string describe_variant(const VariantSpec& spec);

/// Every spec in the finite grid (step-level epsilons drawn from a fixed list).
std::vector<VariantSpec> enumerate_variants();

// Grid helpers.
std::optional<int> fixed_explore_steps(ExploreDurToken d);
bool is_step_param(ExploitParam p);   // n10 .. n10000, n*
bool is_bandit_param(ExploitParam p); // n*, p*
std::optional<double> exploit_value(ExploitParam p);  // steps or probability/rate

inline const std::vector<int>& explore_duration_grid() {
  static const std::vector<int> g{1, 10, 100};
  return g;
}
inline const std::vector<int>& exploit_steps_grid() {
  static const std::vector<int> g{10, 100, 1000, 10000};
  return g;
}
inline const std::vector<double>& rate_grid() {
  static const std::vector<double> g{0.1, 0.01, 0.001, 0.0001};
  return g;
}

std::string_view to_string(ModePair m);

}  // namespace modeswitch
