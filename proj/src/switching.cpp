#include "modeswitch/switching.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "modeswitch/errors.hpp"
#include "modeswitch/qlearner.hpp"

namespace modeswitch {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<double, 4> kTargetRates{0.1, 0.01, 0.001, 0.0001};

std::vector<int> top_actions(std::span<const double> row, int top_k) {
  std::vector<int> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return row[a] > row[b]; });
  order.resize(static_cast<std::size_t>(top_k));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

HomeostasisOutcome homeostasis_step(const HomeostasisState& h, double x, double target_rate,
                                    Rng& rng) {
  if (!(target_rate > 0.0)) throw ConfigError("homeostasis target rate must be > 0");
  HomeostasisOutcome out;
  HomeostasisState& n = out.next;
  n = h;
  n.t = h.t + 1;
  const double tau = std::min(static_cast<double>(n.t), 100.0 / target_rate);
  const double w = 1.0 / tau;
  n.mean = (1.0 - w) * h.mean + w * x;
  const double dev = x - n.mean;
  n.variance = (1.0 - w) * h.variance + w * dev * dev;
  const double z = std::min(dev / std::max(std::sqrt(n.variance), kSigmaFloor), kMaxStandardized);
  const double x_plus = std::exp(z);
  n.transformed_mean = (1.0 - w) * h.transformed_mean + w * x_plus;
  out.probability = std::min(1.0, target_rate * x_plus / n.transformed_mean);
  out.fire = rng.bernoulli(out.probability);
  return out;
}

double value_promise(double v_past, std::span<const double> rewards, double v_now,
                     double gamma) {
  double promised = v_past;
  double discount = 1.0;
  for (double r : rewards) {
    promised -= discount * r;
    discount *= gamma;
  }
  const double d = std::abs(promised - discount * v_now);
  if (!std::isfinite(d)) throw NumericError("value promise on non-finite inputs");
  return d;
}

double action_mismatch(const QTable& q, int head_a, int head_b, int state, int top_k) {
  if (head_a == head_b) throw UsageError("action_mismatch needs two distinct heads");
  const auto row_a = q.row(head_a, state);
  const auto row_b = q.row(head_b, state);
  if (top_k < 1 || top_k > static_cast<int>(row_a.size())) {
    throw UsageError("top_k must lie in [1, number of actions]");
  }
  const auto a = top_actions(row_a, top_k);
  const auto b = top_actions(row_b, top_k);
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return 1.0 - static_cast<double>(common.size()) / top_k;
}

double q_variance(const QTable& q, std::span<const int> heads, int state) {
  if (heads.size() < 2) throw UsageError("q_variance needs at least two heads");
  const int num_actions = q.num_actions();
  const double count = static_cast<double>(heads.size());
  double total = 0.0;
  for (int a = 0; a < num_actions; ++a) {
    double mean = 0.0;
    for (int h : heads) mean += q.value(h, state, a);
    mean /= count;
    double var = 0.0;
    for (int h : heads) {
      const double d = q.value(h, state, a) - mean;
      var += d * d;
    }
    total += var / count;
  }
  return total / num_actions;
}

void PromiseWindow::push(double value, double reward) {
  entries_.push_back({value, reward});
  while (static_cast<int>(entries_.size()) > k_) entries_.pop_front();
}

double PromiseWindow::discrepancy(double v_now, double gamma) const {
  if (!full()) return 0.0;
  std::vector<double> rewards;
  rewards.reserve(entries_.size());
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) rewards.push_back(it->reward);
  return value_promise(entries_.front().value, rewards, v_now, gamma);
}

void SwitchPolicy::validate() const {
  std::visit(Overloaded{
                 [](const BlindStep& b) {
                   if (b.exploit_steps < 1) throw ConfigError("exploit steps must be >= 1");
                 },
                 [](const BlindProb& b) {
                   if (!(b.probability >= 0.0 && b.probability <= 1.0)) {
                     throw ConfigError("switch probability must lie in [0, 1]");
                   }
                 },
                 [](const Informed& i) {
                   if (std::find(kTargetRates.begin(), kTargetRates.end(), i.target_rate) ==
                       kTargetRates.end()) {
                     throw ConfigError("target rate must be one of 0.1, 0.01, 0.001, 0.0001");
                   }
                 },
             },
             trigger);
  if (const auto* f = std::get_if<FixedDuration>(&explore_duration); f && f->steps < 1) {
    throw ConfigError("explore duration must be >= 1");
  }
}

ControllerState episode_init(const SwitchPolicy& policy, std::optional<int> bandit_explore_steps,
                             std::optional<HomeostasisState> carried, int promise_horizon) {
  ControllerState c;
  c.promise_window = PromiseWindow(promise_horizon);
  c.mode = policy.start_mode;
  c.steps_in_mode = 0;
  if (const auto* f = std::get_if<FixedDuration>(&policy.explore_duration)) {
    c.committed_explore_steps = f->steps;
  } else if (std::holds_alternative<BanditDuration>(policy.explore_duration)) {
    if (!bandit_explore_steps) throw UsageError("bandit-chosen duration needs a bandit arm");
    c.committed_explore_steps = *bandit_explore_steps;
  }
  if (std::holds_alternative<Informed>(policy.trigger)) {
    c.homeostasis = carried.value_or(HomeostasisState{});
  }
  return c;
}

std::pair<Mode, ControllerState> controller_step(const ControllerState& c,
                                                 const SwitchPolicy& policy, double signal,
                                                 Rng& rng) {
  ControllerState next = c;
  next.steps_in_mode = c.steps_in_mode + 1;

  bool homeostasis_fired = false;
  if (const auto* inf = std::get_if<Informed>(&policy.trigger)) {
    if (!std::isfinite(signal)) throw NumericError("non-finite trigger signal");
    const auto out =
        homeostasis_step(c.homeostasis.value_or(HomeostasisState{}), signal, inf->target_rate, rng);
    next.homeostasis = out.next;
    homeostasis_fired = out.fire;
  }

  // Entry-trigger decision, also used for exit under symmetric switching.
  const auto trigger_fires = [&](int steps_done) {
    return std::visit(Overloaded{
                          [&](const BlindStep& b) { return steps_done >= b.exploit_steps; },
                          [&](const BlindProb& b) { return rng.bernoulli(b.probability); },
                          [&](const Informed&) { return homeostasis_fired; },
                      },
                      policy.trigger);
  };

  if (c.mode == Mode::Exploit) {
    if (trigger_fires(next.steps_in_mode)) {
      next.mode = Mode::Explore;
      next.steps_in_mode = 0;
      if (const auto* f = std::get_if<FixedDuration>(&policy.explore_duration)) {
        next.committed_explore_steps = f->steps;
      }
    }
  } else {
    const bool symmetric = std::holds_alternative<SymmetricDuration>(policy.explore_duration);
    const bool exit = symmetric ? trigger_fires(next.steps_in_mode)
                                : next.steps_in_mode >= c.committed_explore_steps;
    if (exit) {
      next.mode = Mode::Exploit;
      next.steps_in_mode = 0;
    }
  }
  return {c.mode, std::move(next)};
}

ModeSchedule::ModeSchedule(Granularity granularity, int promise_horizon)
    : granularity_(std::move(granularity)), promise_horizon_(promise_horizon) {
  if (const auto* s = std::get_if<StepLevel>(&granularity_);
      s && !(s->epsilon > 0.0 && s->epsilon <= 1.0)) {
    throw ConfigError("step-level epsilon must lie in (0, 1]");
  }
  if (const auto* intra = std::get_if<IntraEpisode>(&granularity_)) {
    intra->policy.validate();
    episode_policy_ = intra->policy;
  }
  controller_.promise_window = PromiseWindow(promise_horizon_);
}

const SwitchPolicy* ModeSchedule::episode_policy() const {
  return std::holds_alternative<IntraEpisode>(granularity_) ? &episode_policy_ : nullptr;
}

void ModeSchedule::begin_episode(const EpisodeParams& params, Rng& rng) {
  std::visit(Overloaded{
                 [&](const ExperimentLevel& e) { episode_mode_ = e.mode; },
                 [&](const StepLevel&) { episode_mode_ = Mode::Exploit; },
                 [&](const EpisodeLevel&) {
                   const double p = params.explore_probability.value_or(0.0);
                   episode_mode_ = rng.bernoulli(p) ? Mode::Explore : Mode::Exploit;
                 },
                 [&](const IntraEpisode& intra) {
                   episode_policy_ = intra.policy;
                   if (params.trigger) episode_policy_.trigger = *params.trigger;
                   controller_ = episode_init(episode_policy_, params.explore_steps,
                                              controller_.homeostasis, promise_horizon_);
                 },
             },
             granularity_);
}

Mode ModeSchedule::step(double signal, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const ExperimentLevel& e) { return e.mode; },
                        [&](const StepLevel& s) {
                          return rng.bernoulli(s.epsilon) ? Mode::Explore : Mode::Exploit;
                        },
                        [&](const EpisodeLevel&) { return episode_mode_; },
                        [&](const IntraEpisode&) {
                          auto [mode, next] =
                              controller_step(controller_, episode_policy_, signal, rng);
                          next.promise_window = std::move(controller_.promise_window);
                          controller_ = std::move(next);
                          return mode;
                        },
                    },
                    granularity_);
}

}  // namespace modeswitch
