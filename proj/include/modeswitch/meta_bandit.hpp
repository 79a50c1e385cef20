#pragma once

#include <mutex>
#include <span>
#include <vector>

#include "modeswitch/rng.hpp"

namespace modeswitch {

/// Discounted UCB statistics over a fixed set of arms.
///
/// Every update first decays all arms by `decay`, then credits the pulled
/// arm; the resulting means track a moving target. Sampling forces any arm
/// with less than one unit of pull mass, then takes the UCB argmax.
struct BanditState {
  std::vector<double> pulls;    // discounted pull mass n_a
  std::vector<double> returns;  // discounted return sum S_a
  double decay = 0.99;
  double exploration = 1.0;

  static BanditState with_arms(std::size_t num_arms, double decay = 0.99,
                               double exploration = 1.0);

  std::size_t num_arms() const { return pulls.size(); }
  double mean(std::size_t arm) const;
  double total_mass() const;
};

/// Arm index to use for the next episode. The rng is unused by discounted
/// UCB (the choice is deterministic given the statistics).
std::size_t bandit_sample(const BanditState& b, Rng& rng);

BanditState bandit_update(BanditState b, std::size_t arm, double episodic_return);

/// Arm values paired with their bandit.
template <class T>
struct ArmBandit {
  std::vector<T> arms;
  BanditState state;

  explicit ArmBandit(std::vector<T> values, double decay = 0.99, double exploration = 1.0)
      : arms(std::move(values)), state(BanditState::with_arms(arms.size(), decay, exploration)) {}
};

/// Linearizable wrapper for a bandit shared between concurrently running seeds.
class SharedBandit {
 public:
  explicit SharedBandit(BanditState state) : state_(std::move(state)) {}

  std::size_t sample(Rng& rng) {
    std::lock_guard lock(mutex_);
    return bandit_sample(state_, rng);
  }

  void update(std::size_t arm, double episodic_return) {
    std::lock_guard lock(mutex_);
    state_ = bandit_update(std::move(state_), arm, episodic_return);
  }

  BanditState snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
  }

 private:
  mutable std::mutex mutex_;
  BanditState state_;
};

}  // namespace modeswitch
