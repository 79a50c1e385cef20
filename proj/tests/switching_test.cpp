#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "modeswitch/errors.hpp"
#include "modeswitch/qlearner.hpp"
#include "modeswitch/stats.hpp"
#include "modeswitch/switching.hpp"

namespace modeswitch {
namespace {

// ----- value promise ------------------------------------------------------

// Independent calculator: explicit powers, no running discount.
double promise_oracle(double v_past, const std::vector<double>& r, double v_now, double g) {
  double realised = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) realised += std::pow(g, static_cast<double>(i)) * r[i];
  return std::fabs(v_past - realised - std::pow(g, static_cast<double>(r.size())) * v_now);
}

TEST(ValuePromise, Examples) {
  const std::vector<double> ones(5, 1.0);
  // |10 - 4.0951 - 2.95245|
  EXPECT_NEAR(value_promise(10.0, ones, 5.0, 0.9), 2.95245, 1e-12);
  EXPECT_NEAR(value_promise(10.0, ones, 5.0, 0.9), promise_oracle(10.0, ones, 5.0, 0.9), 1e-12);
  EXPECT_EQ(value_promise(0.0, std::vector<double>(5, 0.0), 0.0, 0.9), 0.0);
  // Promise kept: v_past is exactly the realised return (dyadic values keep it exact).
  const std::vector<double> r{1.0, 0.5, 0.25};
  const double kept = 1.0 + 0.5 * 0.5 + 0.25 * 0.25 + 0.125 * 2.0;
  EXPECT_EQ(value_promise(kept, r, 2.0, 0.5), 0.0);
  EXPECT_THROW(value_promise(NAN, r, 0.0, 0.5), NumericError);
}

TEST(ValuePromise, NonNegativeAgainstOracle) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> r(1 + trial % 5);
    for (auto& x : r) x = u(gen);
    const double vp = u(gen), vn = u(gen), g = 0.5 + 0.5 * (trial % 10) / 10.0;
    const double d = value_promise(vp, r, vn, g);
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, promise_oracle(vp, r, vn, g), 1e-9);
  }
}

TEST(PromiseWindow, ZeroUntilFullThenMostRecentFirst) {
  PromiseWindow w(3);
  w.push(4.0, 1.0);
  w.push(9.0, 2.0);
  EXPECT_EQ(w.discrepancy(1.0, 0.5), 0.0);
  w.push(9.0, 3.0);
  // rewards ordered newest first: [3, 2, 1]
  EXPECT_DOUBLE_EQ(w.discrepancy(1.0, 0.5), std::fabs(4.0 - (3.0 + 0.5 * 2.0 + 0.25 * 1.0) - 0.125));
  w.push(0.0, 0.0);
  EXPECT_EQ(w.size(), 3u);
}

// ----- ensemble signals ---------------------------------------------------

TEST(EnsembleSignals, ActionMismatch) {
  QTable q(2, false, 1, 3);
  EXPECT_EQ(action_mismatch(q, 0, 1, 0, 1), 0.0);
  q.set_value(0, 0, 0, 1.0);
  q.set_value(1, 0, 2, 1.0);
  EXPECT_EQ(action_mismatch(q, 0, 1, 0, 1), 1.0);
  // Top-3 sets {2,0,1} vs {2,1,0}: same set, different order.
  QTable r(2, false, 1, 3);
  r.set_value(0, 0, 2, 3.0);
  r.set_value(0, 0, 0, 2.0);
  r.set_value(0, 0, 1, 1.0);
  r.set_value(1, 0, 2, 3.0);
  r.set_value(1, 0, 1, 2.0);
  r.set_value(1, 0, 0, 1.0);
  EXPECT_EQ(action_mismatch(r, 0, 1, 0, 3), 0.0);
  EXPECT_DOUBLE_EQ(action_mismatch(r, 0, 1, 0, 2), 0.5);
  EXPECT_THROW(action_mismatch(r, 0, 0, 0, 1), UsageError);
  EXPECT_THROW(action_mismatch(r, 0, 1, 0, 4), UsageError);
  EXPECT_THROW(action_mismatch(r, 0, 5, 0, 1), UsageError);
}

TEST(EnsembleSignals, QVariance) {
  QTable q(2, false, 1, 2);
  const std::vector<int> heads{0, 1};
  EXPECT_EQ(q_variance(q, heads, 0), 0.0);
  q.set_value(0, 0, 0, 1.0);
  q.set_value(0, 0, 1, 3.0);
  q.set_value(1, 0, 0, 1.0);
  q.set_value(1, 0, 1, 1.0);
  EXPECT_DOUBLE_EQ(q_variance(q, heads, 0), 0.5);
  QTable scaled(2, false, 1, 2);
  for (int h = 0; h < 2; ++h) {
    for (int a = 0; a < 2; ++a) scaled.set_value(h, 0, a, 3.0 * q.value(h, 0, a));
  }
  EXPECT_DOUBLE_EQ(q_variance(scaled, heads, 0), 9.0 * 0.5);
  EXPECT_THROW(q_variance(q, std::vector<int>{0}, 0), UsageError);
}

// ----- homeostasis --------------------------------------------------------

// Line-by-line transcription of the adaptive-threshold pseudocode, kept
// separate from the library implementation.
struct ReferenceHomeostasis {
  double rho;
  double xbar = 0.0, x2bar = 1.0, xplusbar = 1.0;
  double t = 0.0;
  bool step(double x, Rng& rng) {
    t += 1.0;
    const double tau = std::min(t, 100.0 / rho);
    xbar = (1.0 - 1.0 / tau) * xbar + (1.0 / tau) * x;
    x2bar = (1.0 - 1.0 / tau) * x2bar + (1.0 / tau) * (x - xbar) * (x - xbar);
    const double xplus = std::exp((x - xbar) / std::max(std::sqrt(x2bar), 1e-6));
    xplusbar = (1.0 - 1.0 / tau) * xplusbar + (1.0 / tau) * xplus;
    return rng.uniform() < std::min(1.0, rho * xplus / xplusbar);
  }
};

TEST(Homeostasis, InitialStateAndFirstStep) {
  const HomeostasisState h;
  EXPECT_EQ(h.mean, 0.0);
  EXPECT_EQ(h.variance, 1.0);
  EXPECT_EQ(h.transformed_mean, 1.0);
  EXPECT_EQ(h.t, 0u);
  Rng rng(1);
  const auto out = homeostasis_step(h, 7.0, 0.1, rng);
  EXPECT_EQ(out.next.t, 1u);
  EXPECT_EQ(out.next.mean, 7.0);      // tau = 1 at t = 1
  EXPECT_EQ(out.next.variance, 0.0);  // floor keeps x+ finite
  EXPECT_EQ(out.next.transformed_mean, 1.0);
  EXPECT_DOUBLE_EQ(out.probability, 0.1);
}

TEST(Homeostasis, MatchesReferenceTranscription) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n01;
  Rng a(5), b(5);
  HomeostasisState h;
  ReferenceHomeostasis ref{0.01};
  for (int i = 0; i < 20000; ++i) {
    const double x = 2.0 * n01(gen) + std::sin(i * 1e-3);
    const auto out = homeostasis_step(h, x, 0.01, a);
    h = out.next;
    ASSERT_EQ(out.fire, ref.step(x, b)) << "step " << i;
  }
  EXPECT_NEAR(h.mean, ref.xbar, 1e-12);
  EXPECT_NEAR(h.variance, ref.x2bar, 1e-12);
  EXPECT_NEAR(h.transformed_mean, ref.xplusbar, 1e-9);
}

double empirical_rate(const std::vector<double>& stream, double rho, std::uint64_t seed) {
  Rng rng(seed);
  HomeostasisState h;
  std::size_t fired = 0;
  for (double x : stream) {
    const auto out = homeostasis_step(h, x, rho, rng);
    h = out.next;
    fired += out.fire;
  }
  return static_cast<double>(fired) / static_cast<double>(stream.size());
}

TEST(Homeostasis, ConstantStreamHitsTarget) {
  const std::vector<double> stream(100000, 7.0);
  EXPECT_NEAR(empirical_rate(stream, 0.1, 2), 0.1, 0.01);
}

TEST(Homeostasis, RateOneCaps) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n01;
  std::vector<double> stream(10000);
  for (auto& x : stream) x = n01(gen);
  EXPECT_GT(empirical_rate(stream, 1.0, 3), 0.6);
  Rng rng(0);
  const auto out = homeostasis_step(HomeostasisState{}, 5.0, 1.0, rng);
  EXPECT_LE(out.probability, 1.0);
  EXPECT_TRUE(out.fire);  // probability exactly 1 at t = 1
}

TEST(Homeostasis, GaussianStreamHitsTarget) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n01;
  std::vector<double> stream(1000000);
  for (auto& x : stream) x = n01(gen);
  EXPECT_NEAR(empirical_rate(stream, 0.01, 6), 0.01, 0.002);
}

TEST(Homeostasis, AffineInvariance) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> n01;
  std::vector<double> x(1000000), y(1000000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = n01(gen);
    y[i] = 0.25 * x[i] - 40.0;
  }
  const double rx = empirical_rate(x, 0.01, 21);
  const double ry = empirical_rate(y, 0.01, 21);
  EXPECT_NEAR(ry / rx, 1.0, 0.1);
}

TEST(Homeostasis, HugeJumpStaysFinite) {
  Rng rng(1);
  HomeostasisState h;
  for (int i = 0; i < 100; ++i) h = homeostasis_step(h, 0.0, 0.01, rng).next;
  const auto out = homeostasis_step(h, 1e6, 0.01, rng);
  EXPECT_TRUE(std::isfinite(out.next.transformed_mean));
  EXPECT_TRUE(out.fire);
  h = out.next;
  for (int i = 0; i < 100; ++i) {
    const auto o = homeostasis_step(h, 0.0, 0.01, rng);
    EXPECT_TRUE(std::isfinite(o.probability));
    h = o.next;
  }
}

// ----- controller ---------------------------------------------------------

TEST(Controller, BlindStepEntersAfterNG) {
  SwitchPolicy p{BlindStep{100}, FixedDuration{10}, Mode::Exploit};
  auto c = episode_init(p);
  c.steps_in_mode = 99;
  Rng rng(0);
  const auto [mode, next] = controller_step(c, p, 0.0, rng);
  EXPECT_EQ(mode, Mode::Exploit);       // the n_G-th exploit step
  EXPECT_EQ(next.mode, Mode::Explore);  // entered during it
  EXPECT_EQ(next.steps_in_mode, 0);
  EXPECT_EQ(next.committed_explore_steps, 10);
}

TEST(Controller, FixedExploreExits) {
  SwitchPolicy p{BlindStep{100}, FixedDuration{10}, Mode::Explore};
  auto c = episode_init(p);
  c.steps_in_mode = 9;
  Rng rng(0);
  const auto [mode, next] = controller_step(c, p, 0.0, rng);
  EXPECT_EQ(mode, Mode::Explore);
  EXPECT_EQ(next.mode, Mode::Exploit);
}

TEST(Controller, ZeroProbabilityNeverExplores) {
  SwitchPolicy p{BlindProb{0.0}, FixedDuration{10}, Mode::Exploit};
  auto c = episode_init(p);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    auto [mode, next] = controller_step(c, p, 0.0, rng);
    ASSERT_EQ(mode, Mode::Exploit);
    c = std::move(next);
  }
}

std::vector<Mode> run_controller(const SwitchPolicy& p, int steps, std::uint64_t seed,
                                 std::optional<int> bandit_steps = std::nullopt) {
  auto c = episode_init(p, bandit_steps);
  Rng rng(seed);
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    auto [mode, next] = controller_step(c, p, 0.0, rng);
    modes.push_back(mode);
    c = std::move(next);
  }
  return modes;
}

TEST(Controller, StartModes) {
  SwitchPolicy g{BlindStep{50}, FixedDuration{100}, Mode::Exploit};
  EXPECT_EQ(episode_init(g).mode, Mode::Exploit);
  SwitchPolicy x{BlindStep{50}, FixedDuration{100}, Mode::Explore};
  const auto modes = run_controller(x, 160, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(modes[static_cast<std::size_t>(i)], Mode::Explore);
  EXPECT_EQ(modes[100], Mode::Exploit);
  const auto a = episode_init(x);
  const auto b = episode_init(x);
  EXPECT_EQ(a.mode, b.mode);
  EXPECT_EQ(a.steps_in_mode, b.steps_in_mode);
  EXPECT_EQ(a.committed_explore_steps, b.committed_explore_steps);
}

TEST(Controller, DeterministicBlindGivesExactStatistics) {
  SwitchPolicy p{BlindStep{90}, FixedDuration{10}, Mode::Exploit};
  EpisodeTrace t{run_controller(p, 1000, 0), 0.0};
  const std::vector<EpisodeTrace> traces{t};
  EXPECT_EQ(p_X(traces), 0.1);
  for (const auto& period : periods(t)) {
    EXPECT_EQ(period.length, period.mode == Mode::Explore ? 10 : 90);
  }
}

TEST(Controller, BanditDurationIsCommitted) {
  SwitchPolicy p{BlindStep{10}, BanditDuration{}, Mode::Exploit};
  EXPECT_THROW(episode_init(p), UsageError);
  EpisodeTrace t{run_controller(p, 550, 0, 100), 0.0};
  const auto ps = periods(t);
  ASSERT_EQ(ps.size(), 10u);
  for (const auto& period : ps) EXPECT_EQ(period.length, period.mode == Mode::Explore ? 100 : 10);
}

TEST(Controller, RenewalFractionForSingleStepExplore) {
  const double p = 0.1;
  SwitchPolicy policy{BlindProb{p}, FixedDuration{1}, Mode::Exploit};
  const std::vector<EpisodeTrace> traces{{run_controller(policy, 1000000, 4), 0.0}};
  EXPECT_NEAR(p_X(traces) / (p / (1.0 + p)), 1.0, 0.05);
}

TEST(Controller, SymmetricBlindIsBalanced) {
  SwitchPolicy policy{BlindProb{0.01}, SymmetricDuration{}, Mode::Exploit};
  const std::vector<EpisodeTrace> traces{{run_controller(policy, 1000000, 5), 0.0}};
  EXPECT_NEAR(p_X(traces), 0.5, 0.05);
}

TEST(Controller, InformedEntryFollowsTargetRate) {
  SwitchPolicy policy{Informed{SignalKind::ValuePromise, 0.01}, FixedDuration{1}, Mode::Exploit};
  auto c = episode_init(policy);
  Rng rng(6);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n01;
  std::size_t entries = 0;
  const int steps = 500000;
  for (int i = 0; i < steps; ++i) {
    auto [mode, next] = controller_step(c, policy, n01(gen), rng);
    entries += (mode == Mode::Exploit && next.mode == Mode::Explore);
    c = std::move(next);
  }
  EXPECT_EQ(c.homeostasis->t, static_cast<std::uint64_t>(steps));
  // Entry only fires from exploit steps, which are ~99% of all steps.
  EXPECT_NEAR(static_cast<double>(entries) / steps, 0.01, 0.002);
}

TEST(Controller, HomeostasisPersistsAcrossEpisodes) {
  SwitchPolicy policy{Informed{SignalKind::ValuePromise, 0.1}, FixedDuration{10}, Mode::Exploit};
  ModeSchedule schedule(IntraEpisode{policy});
  Rng rng(2);
  schedule.begin_episode({}, rng);
  for (int i = 0; i < 50; ++i) schedule.step(1.0 * i, rng);
  schedule.begin_episode({}, rng);
  EXPECT_EQ(schedule.controller().homeostasis->t, 50u);
  EXPECT_EQ(schedule.controller().steps_in_mode, 0);
}

TEST(Controller, PolicyValidation) {
  EXPECT_THROW((SwitchPolicy{BlindStep{0}, FixedDuration{1}, Mode::Exploit}.validate()),
               ConfigError);
  EXPECT_THROW((SwitchPolicy{BlindProb{1.5}, FixedDuration{1}, Mode::Exploit}.validate()),
               ConfigError);
  EXPECT_THROW((SwitchPolicy{Informed{SignalKind::ValuePromise, 0.2}, FixedDuration{1},
                             Mode::Exploit}
                    .validate()),
               ConfigError);
  EXPECT_NO_THROW((SwitchPolicy{Informed{SignalKind::QVariance, 0.0001}, SymmetricDuration{},
                                Mode::Explore}
                       .validate()));
}

// ----- granularity schedules ---------------------------------------------

TEST(Schedule, ExperimentAndEpisodeLevel) {
  Rng rng(3);
  ModeSchedule x(ExperimentLevel{Mode::Explore});
  x.begin_episode({}, rng);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(x.step(0.0, rng), Mode::Explore);

  ModeSchedule e(EpisodeLevel{});
  int explore_episodes = 0;
  for (int ep = 0; ep < 1000; ++ep) {
    e.begin_episode({.explore_probability = 0.3}, rng);
    const Mode first = e.step(0.0, rng);
    for (int i = 0; i < 5; ++i) ASSERT_EQ(e.step(0.0, rng), first);
    explore_episodes += first == Mode::Explore;
  }
  EXPECT_NEAR(explore_episodes / 1000.0, 0.3, 0.05);
}

TEST(Schedule, StepLevelEpsilonGreedy) {
  Rng rng(4);
  ModeSchedule s(StepLevel{0.01});
  s.begin_episode({}, rng);
  EpisodeTrace t;
  for (int i = 0; i < 1000000; ++i) t.modes.push_back(s.step(0.0, rng));
  const std::vector<EpisodeTrace> traces{t};
  EXPECT_NEAR(p_X(traces) / 0.01, 1.0, 0.1);
  EXPECT_EQ(med_X(traces), 1.0);
  EXPECT_THROW(ModeSchedule(StepLevel{0.0}), ConfigError);
}

TEST(Schedule, EpisodeTriggerOverride) {
  Rng rng(5);
  ModeSchedule s(IntraEpisode{SwitchPolicy{BlindStep{10000}, FixedDuration{1}, Mode::Exploit}});
  s.begin_episode({.trigger = Trigger{BlindStep{3}}}, rng);
  std::string modes;
  for (int i = 0; i < 8; ++i) modes += mode_char(s.step(0.0, rng));
  EXPECT_EQ(modes, "GGGXGGGX");
}

}  // namespace
}  // namespace modeswitch
