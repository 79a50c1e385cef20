#include "modeswitch/meta_bandit.hpp"

#include <cmath>
#include <numeric>

#include "modeswitch/errors.hpp"

namespace modeswitch {

BanditState BanditState::with_arms(std::size_t num_arms, double decay, double exploration) {
  if (num_arms == 0) throw ConfigError("bandit needs at least one arm");
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("bandit decay must lie in (0, 1]");
  BanditState b;
  b.pulls.assign(num_arms, 0.0);
  b.returns.assign(num_arms, 0.0);
  b.decay = decay;
  b.exploration = exploration;
  return b;
}

double BanditState::mean(std::size_t arm) const {
  return pulls.at(arm) > 0.0 ? returns[arm] / pulls[arm] : 0.0;
}

double BanditState::total_mass() const {
  return std::accumulate(pulls.begin(), pulls.end(), 0.0);
}

std::size_t bandit_sample(const BanditState& b, Rng& /*rng*/) {
  if (b.num_arms() == 0) throw ConfigError("bandit has no arms");
  for (std::size_t a = 0; a < b.num_arms(); ++a) {
    if (b.pulls[a] < 1.0) return a;
  }
  const double log_mass = std::log(b.total_mass());
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t a = 0; a < b.num_arms(); ++a) {
    const double score =
        b.returns[a] / b.pulls[a] + b.exploration * std::sqrt(2.0 * log_mass / b.pulls[a]);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

BanditState bandit_update(BanditState b, std::size_t arm, double episodic_return) {
  if (arm >= b.num_arms()) throw UsageError("bandit arm out of range");
  if (!std::isfinite(episodic_return)) throw NumericError("non-finite episodic return");
  for (std::size_t a = 0; a < b.num_arms(); ++a) {
    b.pulls[a] *= b.decay;
    b.returns[a] *= b.decay;
  }
  b.pulls[arm] += 1.0;
  b.returns[arm] += episodic_return;
  return b;
}

}  // namespace modeswitch
