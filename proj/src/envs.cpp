#include "modeswitch/envs.hpp"

#include <algorithm>
#include <charconv>

#include "modeswitch/errors.hpp"

namespace modeswitch {

EnvSpec make_env_spec(EnvKind kind, int size) {
  if (size < 2) {
    throw ConfigError("environment size must be >= 2, got " + std::to_string(size));
  }
  EnvSpec spec;
  spec.kind = kind;
  spec.size = size;
  spec.step_limit = kind == EnvKind::DeepSea ? size : 4 * size;
  return spec;
}

EnvSpec parse_env_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("environment must look like <deepsea|chain>:<N>, got '" + text + "'");
  }
  const std::string name = text.substr(0, colon);
  const std::string digits = text.substr(colon + 1);
  int size = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ConfigError("environment size is not an integer: '" + digits + "'");
  }
  if (name == "deepsea") return make_env_spec(EnvKind::DeepSea, size);
  if (name == "chain") return make_env_spec(EnvKind::DistractorChain, size);
  throw ConfigError("unknown environment '" + name + "' (expected deepsea or chain)");
}

std::string format_env_spec(const EnvSpec& spec) {
  return std::string(spec.kind == EnvKind::DeepSea ? "deepsea:" : "chain:") +
         std::to_string(spec.size);
}

EnvState env_reset(const EnvSpec& spec, std::uint64_t /*seed*/) {
  if (spec.size < 2 || spec.step_limit < 1) {
    throw ConfigError("invalid environment spec");
  }
  EnvState s;
  if (spec.kind == EnvKind::DistractorChain) s.position = 1;
  return s;
}

StepOutcome env_step(const EnvSpec& spec, const EnvState& state, int action) {
  if (state.terminal) throw UsageError("env_step called on a terminal state");
  if (action != kActionLeft && action != kActionRight) {
    throw UsageError("action must be 0 or 1, got " + std::to_string(action));
  }
  const int n = spec.size;
  StepOutcome out;
  EnvState next = state;
  next.steps_elapsed = state.steps_elapsed + 1;

  if (spec.kind == EnvKind::DeepSea) {
    const bool last_step = next.steps_elapsed >= spec.step_limit;
    if (action == kActionRight) {
      out.reward -= 0.01 / n;
      if (last_step && state.col == n - 1) out.reward += 1.0;
      next.col = std::min(state.col + 1, n - 1);
    } else {
      next.col = std::max(state.col - 1, 0);
    }
    next.row = std::min(state.row + 1, n - 1);
    next.terminal = last_step;
  } else {
    next.position = state.position + (action == kActionRight ? 1 : -1);
    if (next.position == 0) {
      out.reward = 0.1;
      next.terminal = true;
    } else if (next.position == n - 1) {
      out.reward = 1.0;
      next.terminal = true;
    } else if (next.steps_elapsed >= spec.step_limit) {
      next.terminal = true;
    }
  }
  out.next_state = next;
  out.terminal = next.terminal;
  return out;
}

double optimal_return(const EnvSpec& spec) {
  return spec.kind == EnvKind::DeepSea ? 0.99 : 1.0;
}

int state_index(const EnvSpec& spec, const EnvState& state) {
  return spec.kind == EnvKind::DeepSea ? state.row * spec.size + state.col : state.position;
}

int num_states(const EnvSpec& spec) {
  return spec.kind == EnvKind::DeepSea ? spec.size * spec.size : spec.size;
}

}  // namespace modeswitch
