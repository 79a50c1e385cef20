#pragma once

#include <cstdint>
#include <string>

namespace modeswitch {

enum class EnvKind { DeepSea, DistractorChain };

/// Environment selection. Build with make_env_spec so that step_limit
/// follows the kind (DeepSea: N, DistractorChain: 4N).
struct EnvSpec {
  EnvKind kind = EnvKind::DeepSea;
  int size = 2;
  int step_limit = 2;

  bool operator==(const EnvSpec&) const = default;
};

EnvSpec make_env_spec(EnvKind kind, int size);

/// Parses "deepsea:<N>" or "chain:<N>".
EnvSpec parse_env_spec(const std::string& text);
std::string format_env_spec(const EnvSpec& spec);

inline constexpr int kNumActions = 2;
inline constexpr int kActionLeft = 0;
inline constexpr int kActionRight = 1;

struct EnvState {
  int row = 0;       // DeepSea only
  int col = 0;       // DeepSea only
  int position = 0;  // DistractorChain only
  int steps_elapsed = 0;
  bool terminal = false;

  bool operator==(const EnvState&) const = default;
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  bool terminal = false;
};

/// Start state. Both environments are deterministic; the seed is accepted
/// so that stochastic variants can slot in without changing callers.
EnvState env_reset(const EnvSpec& spec, std::uint64_t seed);

/// One transition. DeepSea: the row advances every step, "right" costs
/// 0.01/N, and the +1 treasure is paid on the final step when the agent is
/// already in the last column and moves right again (only the all-right
/// trajectory earns it). DistractorChain: the left end pays 0.1, the right
/// end pays 1.0, both terminal; running out of steps is terminal with 0.
StepOutcome env_step(const EnvSpec& spec, const EnvState& state, int action);

double optimal_return(const EnvSpec& spec);

/// Dense index used by the Q-table and the visit counts.
int state_index(const EnvSpec& spec, const EnvState& state);
int num_states(const EnvSpec& spec);

/// Owning wrapper for the actor and evaluator loops.
class Environment {
 public:
  explicit Environment(EnvSpec spec) : spec_(spec) {}

  const EnvSpec& spec() const { return spec_; }
  const EnvState& state() const { return state_; }

  const EnvState& reset(std::uint64_t seed) {
    state_ = env_reset(spec_, seed);
    return state_;
  }

  StepOutcome step(int action) {
    StepOutcome out = env_step(spec_, state_, action);
    state_ = out.next_state;
    return out;
  }

  int observation() const { return state_index(spec_, state_); }

 private:
  EnvSpec spec_;
  EnvState state_;
};

}  // namespace modeswitch
