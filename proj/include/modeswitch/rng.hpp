#pragma once

#include <cstdint>
#include <random>

namespace modeswitch {

// Thin wrapper over mt19937_64. The draws below avoid the standard
// distributions so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Per-role stream offsets; every stream of a run is seed + offset.
enum class StreamRole : std::uint64_t {
  kBehaviour = 1,
  kController = 2,
  kBandit = 3,
  kEnvironment = 4,
  kEvaluation = 5,
  kHeadInit = 100,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamRole role, std::uint64_t index = 0) {
  return seed + static_cast<std::uint64_t>(role) + index;
}

}  // namespace modeswitch
