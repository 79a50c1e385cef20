#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace modeswitch {

struct LearnerConfig {
  int k = 5;               // n-step horizon
  double gamma = 0.997;
  double alpha = 0.1;
  bool watkins_cut = false;
  int ensemble_size = 1;   // extrinsic heads
  bool intrinsic_enabled = false;

  void validate() const;
};

/// Multi-head tabular action values. Heads [0, ensemble) learn the
/// extrinsic reward; when enabled, one extra head learns the novelty reward.
/// Head 0 is the extrinsic head that drives exploitation and evaluation.
class QTable {
 public:
  QTable(int num_extrinsic_heads, bool with_intrinsic_head, int num_states, int num_actions);

  /// Extrinsic heads other than head 0 get uniform noise in [-0.01, 0.01]
  /// drawn from their own seed (seed + head); head 0 stays at zero.
  static QTable for_learner(const LearnerConfig& config, int num_states, int num_actions,
                            std::uint64_t seed);

  int num_heads() const { return num_heads_; }
  int num_extrinsic_heads() const { return num_extrinsic_; }
  std::optional<int> intrinsic_head() const {
    return has_intrinsic_ ? std::optional<int>(num_extrinsic_) : std::nullopt;
  }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double value(int head, int state, int action) const;
  void set_value(int head, int state, int action, double v);

  /// Action values of one (head, state); states outside the table read as 0.
  std::span<const double> row(int head, int state) const;

  const std::vector<double>& raw() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t offset(int head, int state) const;
  void check_head(int head) const;

  int num_extrinsic_;
  bool has_intrinsic_;
  int num_heads_;
  int num_states_;
  int num_actions_;
  std::vector<double> values_;
  std::vector<double> zeros_;
};

/// argmax_a Q(head, state, a); ties go to the lowest action index.
int greedy_action(const QTable& q, int head, int state);

/// max_a Q(head, state, a).
double state_value(const QTable& q, int head, int state);

/// sum_{i<m} gamma^i rewards[i] + gamma^m bootstrap, with m = rewards.size().
double nstep_target(std::span<const double> rewards, double bootstrap, double gamma);

/// Q <- Q + alpha (target - Q) at one cell.
void apply_update(QTable& q, int head, int state, int action, double target, double alpha);

/// Length of the return actually used. Without cutting this is k. With
/// cutting it is the first i >= 1 where the taken action differs from the
/// head's greedy action (the return bootstraps at that state), else k.
int effective_horizon(std::span<const int> actions, std::span<const int> greedy_actions,
                      bool watkins_cut);

/// Writes "head,state,action,value" rows with a header.
void write_qtable_csv(std::ostream& os, const QTable& q);

}  // namespace modeswitch
