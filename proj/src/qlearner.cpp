#include "modeswitch/qlearner.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "modeswitch/csv.hpp"
#include "modeswitch/errors.hpp"
#include "modeswitch/rng.hpp"

namespace modeswitch {

void LearnerConfig::validate() const {
  if (k < 1) throw ConfigError("n-step horizon k must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (ensemble_size < 1) throw ConfigError("ensemble size must be >= 1");
}

QTable::QTable(int num_extrinsic_heads, bool with_intrinsic_head, int num_states,
               int num_actions)
    : num_extrinsic_(num_extrinsic_heads),
      has_intrinsic_(with_intrinsic_head),
      num_heads_(num_extrinsic_heads + (with_intrinsic_head ? 1 : 0)),
      num_states_(num_states),
      num_actions_(num_actions) {
  if (num_extrinsic_heads < 1 || num_states < 1 || num_actions < 1) {
    throw ConfigError("QTable needs at least one head, state and action");
  }
  values_.assign(static_cast<std::size_t>(num_heads_) * num_states_ * num_actions_, 0.0);
  zeros_.assign(static_cast<std::size_t>(num_actions_), 0.0);
}

QTable QTable::for_learner(const LearnerConfig& config, int num_states, int num_actions,
                           std::uint64_t seed) {
  QTable q(config.ensemble_size, config.intrinsic_enabled, num_states, num_actions);
  for (int h = 1; h < config.ensemble_size; ++h) {
    Rng rng(derive_seed(seed, StreamRole::kHeadInit, static_cast<std::uint64_t>(h)));
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        q.set_value(h, s, a, -0.01 + 0.02 * rng.uniform());
      }
    }
  }
  return q;
}

void QTable::check_head(int head) const {
  if (head < 0 || head >= num_heads_) {
    throw UsageError("invalid Q head " + std::to_string(head));
  }
}

std::size_t QTable::offset(int head, int state) const {
  return (static_cast<std::size_t>(head) * num_states_ + static_cast<std::size_t>(state)) *
         num_actions_;
}

std::span<const double> QTable::row(int head, int state) const {
  check_head(head);
  if (state < 0 || state >= num_states_) return zeros_;
  return {values_.data() + offset(head, state), static_cast<std::size_t>(num_actions_)};
}

double QTable::value(int head, int state, int action) const {
  const auto r = row(head, state);
  if (action < 0 || action >= num_actions_) throw UsageError("invalid action");
  return r[static_cast<std::size_t>(action)];
}

void QTable::set_value(int head, int state, int action, double v) {
  check_head(head);
  if (state < 0 || state >= num_states_ || action < 0 || action >= num_actions_) {
    throw UsageError("Q cell out of range");
  }
  values_[offset(head, state) + static_cast<std::size_t>(action)] = v;
}

int greedy_action(const QTable& q, int head, int state) {
  const auto r = q.row(head, state);
  int best = 0;
  for (int a = 1; a < static_cast<int>(r.size()); ++a) {
    if (r[a] > r[best]) best = a;
  }
  return best;
}

double state_value(const QTable& q, int head, int state) {
  const auto r = q.row(head, state);
  return r[static_cast<std::size_t>(greedy_action(q, head, state))];
}

double nstep_target(std::span<const double> rewards, double bootstrap, double gamma) {
  if (rewards.empty()) throw UsageError("nstep_target needs at least one reward");
  double ret = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    ret += discount * r;
    discount *= gamma;
  }
  return ret + discount * bootstrap;
}

void apply_update(QTable& q, int head, int state, int action, double target, double alpha) {
  if (!std::isfinite(target)) throw NumericError("non-finite TD target");
  const double old = q.value(head, state, action);
  q.set_value(head, state, action, old + alpha * (target - old));
}

int effective_horizon(std::span<const int> actions, std::span<const int> greedy_actions,
                      bool watkins_cut) {
  if (actions.size() != greedy_actions.size()) {
    throw UsageError("effective_horizon: action lists differ in length");
  }
  if (actions.empty()) throw UsageError("effective_horizon: empty action list");
  const int k = static_cast<int>(actions.size());
  if (!watkins_cut) return k;
  for (int i = 1; i < k; ++i) {
    if (actions[i] != greedy_actions[i]) return i;
  }
  return k;
}

void write_qtable_csv(std::ostream& os, const QTable& q) {
  os << "head,state,action,value\n";
  for (int h = 0; h < q.num_heads(); ++h) {
    for (int s = 0; s < q.num_states(); ++s) {
      for (int a = 0; a < q.num_actions(); ++a) {
        os << h << ',' << s << ',' << a << ',' << format_real(q.value(h, s, a)) << '\n';
      }
    }
  }
}

}  // namespace modeswitch
