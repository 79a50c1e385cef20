#include "modeswitch/intrinsic.hpp"

#include <algorithm>
#include <cmath>

namespace modeswitch {

void observe(VisitCounts& counts, int state) { counts.observe(state); }

double novelty_reward(const VisitCounts& counts, int state) {
  const auto n = std::max<std::uint64_t>(counts.count(state), 1);
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace modeswitch
