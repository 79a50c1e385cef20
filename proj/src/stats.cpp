#include "modeswitch/stats.hpp"

#include <algorithm>
#include <string>

#include "modeswitch/errors.hpp"

namespace modeswitch {

namespace {

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

template <class Scale>
std::vector<double> explore_lengths(std::span<const EpisodeTrace> traces, Scale scale) {
  std::vector<double> out;
  for (const auto& trace : traces) {
    if (trace.modes.empty()) continue;
    for (const auto& p : periods(trace)) {
      if (p.mode == Mode::Explore) out.push_back(scale(p.length, trace.length()));
    }
  }
  return out;
}

}  // namespace

std::vector<Period> periods(const EpisodeTrace& trace) {
  if (trace.modes.empty()) throw UsageError("periods of an empty trace");
  std::vector<Period> out;
  for (const Mode m : trace.modes) {
    if (out.empty() || out.back().mode != m) {
      out.push_back({m, 1});
    } else {
      ++out.back().length;
    }
  }
  return out;
}

double p_X(std::span<const EpisodeTrace> traces) {
  std::size_t explore = 0;
  std::size_t total = 0;
  for (const auto& trace : traces) {
    total += trace.modes.size();
    explore += static_cast<std::size_t>(std::count(trace.modes.begin(), trace.modes.end(), Mode::Explore));
  }
  return total == 0 ? 0.0 : static_cast<double>(explore) / static_cast<double>(total);
}

std::optional<double> med_X(std::span<const EpisodeTrace> traces) {
  return median(explore_lengths(traces, [](int len, int) { return static_cast<double>(len); }));
}

std::optional<double> rmed_X(std::span<const EpisodeTrace> traces) {
  return median(explore_lengths(
      traces, [](int len, int total) { return static_cast<double>(len) / total; }));
}

ExplorationStats summarize(std::span<const EpisodeTrace> traces) {
  return {p_X(traces), med_X(traces), rmed_X(traces)};
}

EpisodeTrace trace_from_string(std::string_view modes, double episode_return) {
  EpisodeTrace t;
  t.episode_return = episode_return;
  for (const char c : modes) {
    if (c == 'G') {
      t.modes.push_back(Mode::Exploit);
    } else if (c == 'X') {
      t.modes.push_back(Mode::Explore);
    } else {
      throw UsageError(std::string("unknown mode character '") + c + "'");
    }
  }
  return t;
}

}  // namespace modeswitch
