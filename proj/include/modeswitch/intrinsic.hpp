#pragma once

#include <cstdint>
#include <mutex>
#include <unordered_map>

namespace modeswitch {

/// Per-state visit counts; unseen states count as zero.
class VisitCounts {
 public:
  void observe(int state) { ++counts_[state]; }

  std::uint64_t count(int state) const {
    const auto it = counts_.find(state);
    return it == counts_.end() ? 0 : it->second;
  }

  std::size_t distinct_states() const { return counts_.size(); }

  /// Adds another actor's counts into this one (reporting-time aggregation).
  void merge(const VisitCounts& other) {
    for (const auto& [s, c] : other.counts_) counts_[s] += c;
  }

 private:
  std::unordered_map<int, std::uint64_t> counts_;
};

void observe(VisitCounts& counts, int state);

/// 1 / sqrt(max(count, 1)).
double novelty_reward(const VisitCounts& counts, int state);

/// Counts shared by every seed of an experiment (the global-counts toggle).
class SharedVisitCounts {
 public:
  double observe_and_reward(int state) {
    std::lock_guard lock(mutex_);
    counts_.observe(state);
    return novelty_reward(counts_, state);
  }

  VisitCounts snapshot() const {
    std::lock_guard lock(mutex_);
    return counts_;
  }

 private:
  mutable std::mutex mutex_;
  VisitCounts counts_;
};

}  // namespace modeswitch
