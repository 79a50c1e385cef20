#include "modeswitch/harness.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "modeswitch/csv.hpp"
#include "modeswitch/errors.hpp"
#include "modeswitch/meta_bandit.hpp"
#include "modeswitch/rng.hpp"

namespace modeswitch {

namespace {

namespace fs = std::filesystem;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const std::vector<double> kEpisodeExploreProbabilities{0.0, 0.25, 0.5, 0.75, 1.0};

enum class ArmKind { ExploreSteps, ExploitSteps, SwitchProbability, TargetRate, ExploreProbability };

const char* arm_kind_name(ArmKind k) {
  switch (k) {
    case ArmKind::ExploreSteps: return "explore_steps";
    case ArmKind::ExploitSteps: return "exploit_steps";
    case ArmKind::SwitchProbability: return "switch_probability";
    case ArmKind::TargetRate: return "target_rate";
    case ArmKind::ExploreProbability: return "explore_probability";
  }
  return "?";
}

struct BanditSlot {
  ArmKind kind;
  std::vector<double> arms;
  std::shared_ptr<SharedBandit> bandit;
};

// What a variant means operationally: a mode schedule plus the bandits that
// feed it per-episode parameters.
struct Plan {
  Granularity granularity;
  std::vector<BanditSlot> bandits;
};

const char* signal_name(SignalKind s) {
  switch (s) {
    case SignalKind::ValuePromise: return "promise";
    case SignalKind::ActionMismatch: return "mismatch";
    case SignalKind::QVariance: return "variance";
  }
  return "?";
}

Trigger trigger_for(ArmKind kind, double value, SignalKind signal) {
  switch (kind) {
    case ArmKind::ExploitSteps: return BlindStep{static_cast<int>(value)};
    case ArmKind::SwitchProbability: return BlindProb{value};
    default: return Informed{signal, value};
  }
}

std::vector<double> to_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

Plan make_plan(const ExperimentConfig& config) {
  Plan plan;
  std::visit(
      Overloaded{
          [&](const ExperimentLevelSpec& e) { plan.granularity = ExperimentLevel{e.mode}; },
          [&](const StepLevelSpec& s) { plan.granularity = StepLevel{s.epsilon}; },
          [&](const EpisodeLevelSpec&) {
            plan.granularity = EpisodeLevel{};
            plan.bandits.push_back({ArmKind::ExploreProbability, kEpisodeExploreProbabilities, {}});
          },
          [&](const IntraSpec& i) {
            SwitchPolicy policy;
            policy.start_mode = i.start;
            switch (i.explore_dur) {
              case ExploreDurToken::Bandit:
                policy.explore_duration = BanditDuration{};
                plan.bandits.push_back(
                    {ArmKind::ExploreSteps, to_doubles(explore_duration_grid()), {}});
                break;
              case ExploreDurToken::Symmetric:
                policy.explore_duration = SymmetricDuration{};
                break;
              default:
                policy.explore_duration = FixedDuration{*fixed_explore_steps(i.explore_dur)};
            }
            const ArmKind exploit_kind = i.trigger == TriggerType::Informed ? ArmKind::TargetRate
                                         : is_step_param(i.exploit)       ? ArmKind::ExploitSteps
                                                                          : ArmKind::SwitchProbability;
            if (is_bandit_param(i.exploit)) {
              const auto arms = exploit_kind == ArmKind::ExploitSteps
                                    ? to_doubles(exploit_steps_grid())
                                    : rate_grid();
              policy.trigger = trigger_for(exploit_kind, arms.front(), config.trigger_signal);
              plan.bandits.push_back({exploit_kind, arms, {}});
            } else {
              policy.trigger =
                  trigger_for(exploit_kind, *exploit_value(i.exploit), config.trigger_signal);
            }
            plan.granularity = IntraEpisode{policy};
          },
      },
      config.variant.granularity);
  return plan;
}

LearnerConfig resolved_learner(const ExperimentConfig& config) {
  LearnerConfig lc = config.learner;
  if (config.variant.mode_pair == ModePair::XI) lc.intrinsic_enabled = true;
  return lc;
}

bool uses_informed_signal(const Plan& plan) {
  const auto* intra = std::get_if<IntraEpisode>(&plan.granularity);
  return intra && std::holds_alternative<Informed>(intra->policy.trigger);
}

struct Transition {
  int state;
  int action;
  double reward;
  double intrinsic_reward;
  int next_state;
};

// One actor: environment, learner, counts and mode schedule for one seed.
class Actor {
 public:
  Actor(const ExperimentConfig& config, std::uint64_t seed, std::vector<BanditSlot> bandits,
        SharedVisitCounts* global_counts)
      : config_(config),
        learner_(resolved_learner(config)),
        seed_(seed),
        env_(config.env),
        plan_(make_plan(config)),
        schedule_(plan_.granularity, learner_.k),
        behaviour_rng_(derive_seed(seed, StreamRole::kBehaviour)),
        controller_rng_(derive_seed(seed, StreamRole::kController)),
        bandit_rng_(derive_seed(seed, StreamRole::kBandit)),
        global_counts_(global_counts),
        informed_(uses_informed_signal(plan_)) {
    plan_.bandits = std::move(bandits);
    result_.seed = seed;
    result_.q = QTable::for_learner(learner_, num_states(config.env), kNumActions, seed);
  }

  SeedResult run() {
    for (int ep = 0; ep < config_.total_episodes; ++ep) {
      run_episode(ep);
      const int done = ep + 1;
      if (done % config_.eval_every == 0 || done == config_.total_episodes) {
        const double ret =
            evaluate_greedy(result_.q, config_.env, config_.eval_episodes,
                            derive_seed(seed_, StreamRole::kEvaluation, static_cast<std::uint64_t>(ep)));
        result_.learning_curve.push_back({done, ret, ret / optimal_return(config_.env)});
      }
    }
    result_.stats = window_stats(result_.episodes);
    if (global_counts_) result_.counts = global_counts_->snapshot();
    return std::move(result_);
  }

 private:
  void run_episode(int ep) {
    EpisodeParams params;
    std::vector<std::size_t> pulled(plan_.bandits.size());
    for (std::size_t b = 0; b < plan_.bandits.size(); ++b) {
      const auto& slot = plan_.bandits[b];
      pulled[b] = slot.bandit->sample(bandit_rng_);
      const double value = slot.arms[pulled[b]];
      switch (slot.kind) {
        case ArmKind::ExploreSteps: params.explore_steps = static_cast<int>(value); break;
        case ArmKind::ExploreProbability: params.explore_probability = value; break;
        default: params.trigger = trigger_for(slot.kind, value, config_.trigger_signal);
      }
    }
    schedule_.begin_episode(params, controller_rng_);

    env_.reset(derive_seed(seed_, StreamRole::kEnvironment, static_cast<std::uint64_t>(ep)));
    int state = env_.observation();
    if (learner_.intrinsic_enabled) observe_novelty(state);
    buffer_.clear();

    RecordedEpisode rec;
    double episode_return = 0.0;
    bool terminal = false;
    while (!terminal) {
      const double signal = informed_ ? trigger_signal(state) : 0.0;
      const Mode mode = schedule_.step(signal, controller_rng_);
      const int action = choose_action(mode, state);
      const StepOutcome out = env_.step(action);
      const int next = env_.observation();
      terminal = out.terminal;
      episode_return += out.reward;

      const double intrinsic = learner_.intrinsic_enabled ? observe_novelty(next) : 0.0;
      if (informed_) {
        schedule_.controller().promise_window.push(state_value(result_.q, 0, state), out.reward);
      }
      buffer_.push_back({state, action, out.reward, intrinsic, next});
      learn(terminal);

      rec.trace.modes.push_back(mode);
      if (config_.record_traces) {
        rec.rewards.push_back(out.reward);
        rec.signals.push_back(signal);
      }
      state = next;
    }
    rec.trace.episode_return = episode_return;
    result_.episodes.push_back(std::move(rec));

    for (std::size_t b = 0; b < plan_.bandits.size(); ++b) {
      auto& slot = plan_.bandits[b];
      slot.bandit->update(pulled[b], episode_return);
      result_.bandit_log.push_back(
          {ep, arm_kind_name(slot.kind), pulled[b], slot.arms[pulled[b]], episode_return});
    }
  }

  double observe_novelty(int state) {
    if (global_counts_) return global_counts_->observe_and_reward(state);
    observe(result_.counts, state);
    return novelty_reward(result_.counts, state);
  }

  double trigger_signal(int state) const {
    const QTable& q = result_.q;
    switch (config_.trigger_signal) {
      case SignalKind::ValuePromise:
        return schedule_.controller().promise_window.discrepancy(state_value(q, 0, state),
                                                                 learner_.gamma);
      case SignalKind::ActionMismatch:
        return action_mismatch(q, 0, 1, state, config_.top_k);
      case SignalKind::QVariance: {
        std::vector<int> heads(static_cast<std::size_t>(q.num_extrinsic_heads()));
        for (int h = 0; h < q.num_extrinsic_heads(); ++h) heads[static_cast<std::size_t>(h)] = h;
        return q_variance(q, heads, state);
      }
    }
    return 0.0;
  }

  int epsilon_greedy(double epsilon, int head, int state) {
    if (behaviour_rng_.bernoulli(epsilon)) {
      return static_cast<int>(behaviour_rng_.below(kNumActions));
    }
    return greedy_action(result_.q, head, state);
  }

  int choose_action(Mode mode, int state) {
    const ModePair pair = config_.variant.mode_pair;
    if (mode == Mode::Exploit) {
      return pair == ModePair::XS ? epsilon_greedy(kSoftExploitEpsilon, 0, state)
                                  : greedy_action(result_.q, 0, state);
    }
    switch (pair) {
      case ModePair::XU: return static_cast<int>(behaviour_rng_.below(kNumActions));
      case ModePair::XI: return greedy_action(result_.q, *result_.q.intrinsic_head(), state);
      case ModePair::XS: return epsilon_greedy(kSoftExploreEpsilon, 0, state);
    }
    return 0;
  }

  // Updates the oldest buffered transition once k transitions are available
  // (or all of them once the episode has ended).
  void learn(bool terminal) {
    const auto k = static_cast<std::size_t>(learner_.k);
    if (!terminal) {
      if (buffer_.size() == k) {
        update_front(false);
        buffer_.pop_front();
      }
      return;
    }
    while (!buffer_.empty()) {
      update_front(true);
      buffer_.pop_front();
    }
  }

  void update_front(bool ends_terminal) {
    QTable& q = result_.q;
    const std::size_t n = buffer_.size();
    std::vector<int> actions(n);
    for (std::size_t i = 0; i < n; ++i) actions[i] = buffer_[i].action;

    const Transition& first = buffer_.front();
    struct Pending {
      int head;
      double target;
    };
    std::vector<Pending> pending;
    for (int h = 0; h < q.num_heads(); ++h) {
      const bool intrinsic = q.intrinsic_head() == h;
      std::vector<int> greedy(n);
      for (std::size_t i = 0; i < n; ++i) greedy[i] = greedy_action(q, h, buffer_[i].state);
      const int m = effective_horizon(actions, greedy, learner_.watkins_cut);
      std::vector<double> rewards(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const auto& tr = buffer_[static_cast<std::size_t>(i)];
        rewards[static_cast<std::size_t>(i)] = intrinsic ? tr.intrinsic_reward : tr.reward;
      }
      double bootstrap = 0.0;
      if (static_cast<std::size_t>(m) < n) {
        bootstrap = state_value(q, h, buffer_[static_cast<std::size_t>(m)].state);
      } else if (!ends_terminal) {
        bootstrap = state_value(q, h, buffer_.back().next_state);
      }
      pending.push_back({h, nstep_target(rewards, bootstrap, learner_.gamma)});
    }
    for (const auto& p : pending) {
      apply_update(q, p.head, first.state, first.action, p.target, learner_.alpha);
    }
  }

  const ExperimentConfig& config_;
  LearnerConfig learner_;
  std::uint64_t seed_;
  Environment env_;
  Plan plan_;
  ModeSchedule schedule_;
  Rng behaviour_rng_;
  Rng controller_rng_;
  Rng bandit_rng_;
  SharedVisitCounts* global_counts_;
  bool informed_;
  std::deque<Transition> buffer_;
  SeedResult result_;
};

std::vector<BanditSlot> fresh_bandits(const Plan& plan) {
  std::vector<BanditSlot> out = plan.bandits;
  for (auto& slot : out) {
    slot.bandit = std::make_shared<SharedBandit>(BanditState::with_arms(slot.arms.size()));
  }
  return out;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

}  // namespace

void ExperimentConfig::validate() const {
  validate_variant(variant);
  learner.validate();
  if (env.size < 2 || env.step_limit < 1) throw ConfigError("invalid environment");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (total_episodes < 1) throw ConfigError("episodes must be >= 1");
  if (eval_every < 1) throw ConfigError("eval-every must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval-episodes must be >= 1");
  if (top_k < 1 || top_k > kNumActions) {
    throw ConfigError("top-k must lie in [1, " + std::to_string(kNumActions) + "]");
  }
  const auto* intra = std::get_if<IntraSpec>(&variant.granularity);
  if (intra && intra->trigger == TriggerType::Informed &&
      trigger_signal != SignalKind::ValuePromise && learner.ensemble_size < 2) {
    throw ConfigError("ensemble-based trigger signals need --ensemble >= 2");
  }
}

std::string config_echo(const ExperimentConfig& c) {
  const LearnerConfig lc = resolved_learner(c);
  std::ostringstream os;
  os << "variant=" << format_variant(c.variant) << '\n';
  os << "env=" << format_env_spec(c.env) << '\n';
  os << "seeds=";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << '\n';
  os << "episodes=" << c.total_episodes << '\n';
  os << "eval-every=" << c.eval_every << '\n';
  os << "eval-episodes=" << c.eval_episodes << '\n';
  os << "k=" << lc.k << '\n';
  os << "gamma=" << format_real(lc.gamma) << '\n';
  os << "alpha=" << format_real(lc.alpha) << '\n';
  os << "watkins-cut=" << (lc.watkins_cut ? "true" : "false") << '\n';
  os << "ensemble=" << lc.ensemble_size << '\n';
  os << "intrinsic=" << (lc.intrinsic_enabled ? "true" : "false") << '\n';
  os << "trigger-signal=" << signal_name(c.trigger_signal) << '\n';
  os << "top-k=" << c.top_k << '\n';
  os << "parallel-seeds=" << (c.parallel_seeds ? "true" : "false") << '\n';
  os << "shared-bandit=" << (c.shared_bandit ? "true" : "false") << '\n';
  os << "global-counts=" << (c.global_counts ? "true" : "false") << '\n';
  os << "dump-q=" << (c.dump_q ? "true" : "false") << '\n';
  return os.str();
}

double evaluate_greedy(const QTable& q, const EnvSpec& env_spec, int episodes,
                       std::uint64_t seed) {
  if (episodes < 1) throw UsageError("evaluate_greedy needs at least one episode");
  Environment env(env_spec);
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset(seed + static_cast<std::uint64_t>(ep));
    bool terminal = false;
    while (!terminal) {
      const StepOutcome out = env.step(greedy_action(q, 0, env.observation()));
      total += out.reward;
      terminal = out.terminal;
    }
  }
  return total / episodes;
}

std::vector<StatsRow> window_stats(const std::vector<RecordedEpisode>& episodes) {
  std::vector<EpisodeTrace> traces;
  traces.reserve(episodes.size());
  for (const auto& e : episodes) traces.push_back(e.trace);
  const std::size_t window = std::max<std::size_t>(1, traces.size() / 10);
  const std::span<const EpisodeTrace> all(traces);
  std::vector<StatsRow> rows;
  if (traces.empty()) return rows;
  rows.push_back({"first_10pct", summarize(all.first(window))});
  rows.push_back({"last_10pct", summarize(all.last(window))});
  rows.push_back({"all", summarize(all)});
  return rows;
}

ExperimentResult train(const ExperimentConfig& config) {
  config.validate();
  const Plan plan = make_plan(config);
  const auto shared = fresh_bandits(plan);
  std::unique_ptr<SharedVisitCounts> global_counts;
  if (config.global_counts) global_counts = std::make_unique<SharedVisitCounts>();

  ExperimentResult result;
  result.seeds.resize(config.seeds.size());
  const auto run_one = [&](std::size_t i) {
    Actor actor(config, config.seeds[i], config.shared_bandit ? shared : fresh_bandits(plan),
                global_counts.get());
    result.seeds[i] = actor.run();
  };

  if (config.parallel_seeds && config.seeds.size() > 1) {
    std::vector<std::thread> workers;
    std::mutex error_mutex;
    std::exception_ptr error;
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) run_one(i);
  }
  return result;
}

void write_learning_curve_csv(std::ostream& os, const SeedResult& r) {
  os << "episode,eval_return,normalized_return\n";
  for (const auto& p : r.learning_curve) {
    os << p.episode << ',' << format_real(p.eval_return) << ','
       << format_real(p.normalized_return) << '\n';
  }
}

void write_traces_csv(std::ostream& os, const SeedResult& r) {
  os << "episode_id,step,mode,reward,trigger_signal\n";
  for (std::size_t e = 0; e < r.episodes.size(); ++e) {
    const auto& ep = r.episodes[e];
    for (std::size_t t = 0; t < ep.trace.modes.size(); ++t) {
      os << e << ',' << t << ',' << mode_char(ep.trace.modes[t]) << ',';
      if (t < ep.rewards.size()) os << format_real(ep.rewards[t]);
      os << ',';
      if (t < ep.signals.size()) os << format_real(ep.signals[t]);
      os << '\n';
    }
  }
}

void write_stats_csv(std::ostream& os, const SeedResult& r) {
  os << "window,p_X,med_X,rmed_X\n";
  for (const auto& row : r.stats) {
    os << row.window << ',' << format_real(row.stats.p_X) << ','
       << optional_real(row.stats.med_X) << ',' << optional_real(row.stats.rmed_X) << '\n';
  }
}

void write_bandit_log_csv(std::ostream& os, const SeedResult& r) {
  os << "episode,bandit,arm,arm_value,return\n";
  for (const auto& row : r.bandit_log) {
    os << row.episode << ',' << row.bandit << ',' << row.arm << ',' << format_real(row.arm_value)
       << ',' << format_real(row.episodic_return) << '\n';
  }
}

fs::path run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir)) {
    throw ConfigError("cannot create output directory " + config.out_dir.string());
  }
  // Probe writability before spending time on training.
  open_for_write(config.out_dir / "config.txt") << config_echo(config);

  const ExperimentResult result = train(config);
  for (const auto& seed : result.seeds) {
    const fs::path dir = config.out_dir / ("seed_" + std::to_string(seed.seed));
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create " + dir.string());
    auto curve = open_for_write(dir / "learning_curve.csv");
    write_learning_curve_csv(curve, seed);
    auto traces = open_for_write(dir / "traces.csv");
    write_traces_csv(traces, seed);
    auto stats = open_for_write(dir / "stats.csv");
    write_stats_csv(stats, seed);
    auto bandit = open_for_write(dir / "bandit_log.csv");
    write_bandit_log_csv(bandit, seed);
    open_for_write(dir / "config.txt") << config_echo(config);
    if (config.dump_q) {
      auto q = open_for_write(dir / "q_table.csv");
      write_qtable_csv(q, seed.q);
    }
    for (auto* os : {&curve, &traces, &stats, &bandit}) {
      os->flush();
      if (!*os) throw ConfigError("write failed under " + dir.string());
    }
  }
  return config.out_dir;
}

}  // namespace modeswitch
