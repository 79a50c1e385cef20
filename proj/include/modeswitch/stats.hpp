#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "modeswitch/switching.hpp"

namespace modeswitch {

/// Per-step behaviour modes of one episode.
struct EpisodeTrace {
  std::vector<Mode> modes;
  double episode_return = 0.0;

  int length() const { return static_cast<int>(modes.size()); }
};

struct Period {
  Mode mode;
  int length;

  bool operator==(const Period&) const = default;
};

/// Maximal runs of equal mode, in order.
std::vector<Period> periods(const EpisodeTrace& trace);

/// Fraction of explore steps, pooled over all traces.
double p_X(std::span<const EpisodeTrace> traces);

/// Median explore-period length (steps), pooled over traces. Absent when no
/// trace contains an explore period. Even counts average the middle pair.
std::optional<double> med_X(std::span<const EpisodeTrace> traces);

/// As med_X, but each period length is divided by its episode's length.
std::optional<double> rmed_X(std::span<const EpisodeTrace> traces);

struct ExplorationStats {
  double p_X = 0.0;
  std::optional<double> med_X;
  std::optional<double> rmed_X;
};

ExplorationStats summarize(std::span<const EpisodeTrace> traces);

/// Builds a trace from "G"/"X" characters, e.g. "GGXXXG".
EpisodeTrace trace_from_string(std::string_view modes, double episode_return = 0.0);

}  // namespace modeswitch
