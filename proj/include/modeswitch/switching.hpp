#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <variant>

#include "modeswitch/rng.hpp"

namespace modeswitch {

class QTable;

enum class Mode : std::uint8_t { Exploit, Explore };

inline char mode_char(Mode m) { return m == Mode::Explore ? 'X' : 'G'; }

// ---------------------------------------------------------------------------
// Homeostasis: turns a scalar stream into binary switch decisions at a
// target rate, independent of the stream's location and scale.
// ---------------------------------------------------------------------------

inline constexpr double kSigmaFloor = 1e-6;
// exp() argument cap; larger standardized values would overflow to inf.
inline constexpr double kMaxStandardized = 700.0;

struct HomeostasisState {
  double mean = 0.0;
  double variance = 1.0;
  double transformed_mean = 1.0;
  std::uint64_t t = 0;

  bool operator==(const HomeostasisState&) const = default;
};

struct HomeostasisOutcome {
  bool fire = false;
  double probability = 0.0;
  HomeostasisState next;
};

/// One step of the adaptive threshold:
///   tau   = min(t, 100/rate)
///   mean  <- (1-1/tau) mean + x/tau
///   var   <- (1-1/tau) var  + (x-mean)^2/tau     (mean already updated)
///   x+    = exp((x-mean) / max(sqrt(var), floor))
///   mean+ <- (1-1/tau) mean+ + x+/tau
///   fire ~ Bernoulli(min(1, rate x+/mean+))
HomeostasisOutcome homeostasis_step(const HomeostasisState& h, double x, double target_rate,
                                    Rng& rng);

// ---------------------------------------------------------------------------
// Trigger signals
// ---------------------------------------------------------------------------

/// |v_past - sum_i gamma^i rewards[i] - gamma^k v_now|, where rewards[0] is the
/// most recent reward and k = rewards.size().
double value_promise(double v_past, std::span<const double> rewards, double v_now,
                     double gamma);

/// 1 - |top_k(head_a) & top_k(head_b)| / top_k over the actions at `state`.
double action_mismatch(const QTable& q, int head_a, int head_b, int state, int top_k);

/// Mean over actions of the population variance across `heads`.
double q_variance(const QTable& q, std::span<const int> heads, int state);

/// Last k (value estimate, reward) pairs of the current episode, oldest first.
class PromiseWindow {
 public:
  explicit PromiseWindow(int k = 5) : k_(k) {}

  void clear() { entries_.clear(); }
  /// Records V(s_t) together with the reward received on leaving s_t.
  void push(double value, double reward);
  bool full() const { return static_cast<int>(entries_.size()) == k_; }
  std::size_t size() const { return entries_.size(); }

  /// Discrepancy against the current estimate; 0 until the window is full.
  double discrepancy(double v_now, double gamma) const;

 private:
  struct Entry {
    double value;
    double reward;
  };
  int k_;
  std::deque<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Intra-episodic switching policy and controller
// ---------------------------------------------------------------------------

enum class SignalKind { ValuePromise, ActionMismatch, QVariance };

struct BlindStep {
  int exploit_steps = 100;
};
struct BlindProb {
  double probability = 0.01;
};
struct Informed {
  SignalKind signal = SignalKind::ValuePromise;
  double target_rate = 0.01;
};
using Trigger = std::variant<BlindStep, BlindProb, Informed>;

struct FixedDuration {
  int steps = 10;
};
struct BanditDuration {};
struct SymmetricDuration {};
using ExploreDuration = std::variant<FixedDuration, BanditDuration, SymmetricDuration>;

struct SwitchPolicy {
  Trigger trigger = BlindStep{};
  ExploreDuration explore_duration = FixedDuration{};
  Mode start_mode = Mode::Exploit;

  void validate() const;
};

struct ControllerState {
  Mode mode = Mode::Exploit;
  int steps_in_mode = 0;
  int committed_explore_steps = 0;  // meaningless under SymmetricDuration
  std::optional<HomeostasisState> homeostasis;
  PromiseWindow promise_window;
};

/// Fresh per-episode state. `bandit_explore_steps` supplies n_X for
/// BanditDuration; `carried` is the homeostasis state from the previous
/// episode (moments live for the whole experiment).
ControllerState episode_init(const SwitchPolicy& policy,
                             std::optional<int> bandit_explore_steps = std::nullopt,
                             std::optional<HomeostasisState> carried = std::nullopt,
                             int promise_horizon = 5);

/// Returns the mode of the current step and the state for the next one.
///
/// The mode of this step is the mode held on entry. Triggers evaluated during
/// the step only affect later steps: a BlindStep trigger with n_G fires on the
/// n_G-th exploit step, so exploit periods last exactly n_G steps; a fixed
/// explore period of n_X steps likewise ends after its n_X-th step.
/// Informed triggers update homeostasis on every step, but can only fire an
/// entry from exploit mode (or an exit, under symmetric switching).
std::pair<Mode, ControllerState> controller_step(const ControllerState& c,
                                                 const SwitchPolicy& policy, double signal,
                                                 Rng& rng);

// ---------------------------------------------------------------------------
// Granularity-level schedules
// ---------------------------------------------------------------------------

struct ExperimentLevel {
  Mode mode = Mode::Exploit;
};
struct StepLevel {
  double epsilon = 0.01;
};
struct EpisodeLevel {};
struct IntraEpisode {
  SwitchPolicy policy;
};
using Granularity = std::variant<ExperimentLevel, StepLevel, EpisodeLevel, IntraEpisode>;

/// Per-episode parameters, typically drawn from bandits.
struct EpisodeParams {
  std::optional<double> explore_probability;  // EpisodeLevel
  std::optional<int> explore_steps;           // BanditDuration
  std::optional<Trigger> trigger;             // replaces the policy trigger
};

/// Mode source for one actor across all granularities. Owns the homeostasis
/// moments so that they persist from one episode to the next.
class ModeSchedule {
 public:
  explicit ModeSchedule(Granularity granularity, int promise_horizon = 5);

  void begin_episode(const EpisodeParams& params, Rng& rng);

  /// Mode for the current step given this step's trigger signal.
  Mode step(double signal, Rng& rng);

  const Granularity& granularity() const { return granularity_; }
  /// Intra-episodic controller (only meaningful for IntraEpisode).
  const ControllerState& controller() const { return controller_; }
  ControllerState& controller() { return controller_; }
  const SwitchPolicy* episode_policy() const;

 private:
  Granularity granularity_;
  int promise_horizon_;
  SwitchPolicy episode_policy_;
  Mode episode_mode_ = Mode::Exploit;
  ControllerState controller_;
};

}  // namespace modeswitch
