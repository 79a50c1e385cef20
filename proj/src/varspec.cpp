#include "modeswitch/varspec.hpp"

#include <array>
#include <charconv>
#include <sstream>
#include <utility>

#include "modeswitch/errors.hpp"

namespace modeswitch {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::pair<std::string_view, ModePair>, 3> kModePairs{{
    {"XU", ModePair::XU},
    {"XI", ModePair::XI},
    {"XS", ModePair::XS},
}};

constexpr std::array<std::pair<std::string_view, ExploreDurToken>, 5> kDurations{{
    {"1", ExploreDurToken::N1},
    {"10", ExploreDurToken::N10},
    {"100", ExploreDurToken::N100},
    {"*", ExploreDurToken::Bandit},
    {"=", ExploreDurToken::Symmetric},
}};

constexpr std::array<std::pair<std::string_view, TriggerType>, 2> kTriggers{{
    {"blind", TriggerType::Blind},
    {"informed", TriggerType::Informed},
}};

constexpr std::array<std::pair<std::string_view, ExploitParam>, 10> kExploitParams{{
    {"n10", ExploitParam::N10},
    {"n100", ExploitParam::N100},
    {"n1000", ExploitParam::N1000},
    {"n10000", ExploitParam::N10000},
    {"p0.1", ExploitParam::P0_1},
    {"p0.01", ExploitParam::P0_01},
    {"p0.001", ExploitParam::P0_001},
    {"p0.0001", ExploitParam::P0_0001},
    {"n*", ExploitParam::NBandit},
    {"p*", ExploitParam::PBandit},
}};

constexpr std::array<std::pair<std::string_view, Mode>, 2> kStarts{{
    {"G", Mode::Exploit},
    {"X", Mode::Explore},
}};

template <class T, std::size_t N>
T lookup(const std::array<std::pair<std::string_view, T>, N>& table, std::string_view token,
         std::size_t pos, const char* what) {
  for (const auto& [name, value] : table) {
    if (name == token) return value;
  }
  throw ParseError(std::string(token), pos, std::string("unknown ") + what);
}

template <class T, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, T>, N>& table, T value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

std::string format_epsilon(double eps) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), eps, std::chars_format::fixed);
  return std::string(buf.data(), ptr);
}

IntraSpec parse_intra(std::string_view body, std::size_t offset) {
  // body is the text between the parentheses.
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ',') {
      fields.emplace_back(body.substr(start, i - start), offset + start);
      start = i + 1;
    }
  }
  if (fields.size() != 4) {
    throw ParseError(std::string(body), offset,
                     "intra tuple takes 4 fields (duration,trigger,exploit,start), got " +
                         std::to_string(fields.size()));
  }
  IntraSpec s;
  s.explore_dur = lookup(kDurations, fields[0].first, fields[0].second, "explore duration");
  s.trigger = lookup(kTriggers, fields[1].first, fields[1].second, "trigger type");
  s.exploit = lookup(kExploitParams, fields[2].first, fields[2].second, "exploit parameter");
  s.start = lookup(kStarts, fields[3].first, fields[3].second, "start mode");
  if (s.trigger == TriggerType::Informed && is_step_param(s.exploit)) {
    throw ParseError(std::string(fields[2].first), fields[2].second,
                     "informed triggers take a target rate (p...), not a step count");
  }
  return s;
}

}  // namespace

std::string_view to_string(ModePair m) { return name_of(kModePairs, m); }

std::optional<int> fixed_explore_steps(ExploreDurToken d) {
  switch (d) {
    case ExploreDurToken::N1: return 1;
    case ExploreDurToken::N10: return 10;
    case ExploreDurToken::N100: return 100;
    default: return std::nullopt;
  }
}

bool is_step_param(ExploitParam p) {
  switch (p) {
    case ExploitParam::N10:
    case ExploitParam::N100:
    case ExploitParam::N1000:
    case ExploitParam::N10000:
    case ExploitParam::NBandit:
      return true;
    default:
      return false;
  }
}

bool is_bandit_param(ExploitParam p) {
  return p == ExploitParam::NBandit || p == ExploitParam::PBandit;
}

std::optional<double> exploit_value(ExploitParam p) {
  switch (p) {
    case ExploitParam::N10: return 10.0;
    case ExploitParam::N100: return 100.0;
    case ExploitParam::N1000: return 1000.0;
    case ExploitParam::N10000: return 10000.0;
    case ExploitParam::P0_1: return 0.1;
    case ExploitParam::P0_01: return 0.01;
    case ExploitParam::P0_001: return 0.001;
    case ExploitParam::P0_0001: return 0.0001;
    default: return std::nullopt;
  }
}

VariantSpec parse_variant(std::string_view text) {
  const std::size_t dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw ParseError(std::string(text), 0, "expected <mode>-<granularity>");
  }
  VariantSpec spec;
  spec.mode_pair = lookup(kModePairs, text.substr(0, dash), 0, "explore mode");

  const std::size_t rest_pos = dash + 1;
  const std::string_view rest = text.substr(rest_pos);

  constexpr std::string_view kIntra = "intra(";
  constexpr std::string_view kStep = "step-level-";
  constexpr std::string_view kEpisode = "episode-level-";
  constexpr std::string_view kExperiment = "experiment-level-";

  if (rest.starts_with(kIntra)) {
    const std::size_t body_pos = rest_pos + kIntra.size();
    const std::size_t close = text.find(')', body_pos);
    if (close == std::string_view::npos) {
      throw ParseError(std::string(text.substr(body_pos)), body_pos, "missing ')'");
    }
    if (close + 1 != text.size()) {
      throw ParseError(std::string(text.substr(close + 1)), close + 1,
                       "unexpected text after ')'");
    }
    spec.granularity = parse_intra(text.substr(body_pos, close - body_pos), body_pos);
  } else if (rest.starts_with(kStep)) {
    const std::size_t pos = rest_pos + kStep.size();
    const std::string_view num = text.substr(pos);
    double eps = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), eps);
    if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size()) {
      throw ParseError(std::string(num), pos, "epsilon is not a number");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw ParseError(std::string(num), pos, "epsilon must lie in (0, 1]");
    }
    spec.granularity = StepLevelSpec{eps};
  } else if (rest.starts_with(kEpisode)) {
    const std::size_t pos = rest_pos + kEpisode.size();
    if (text.substr(pos) != "*") {
      throw ParseError(std::string(text.substr(pos)), pos, "episode level only supports '*'");
    }
    spec.granularity = EpisodeLevelSpec{};
  } else if (rest.starts_with(kExperiment)) {
    const std::size_t pos = rest_pos + kExperiment.size();
    spec.granularity = ExperimentLevelSpec{lookup(kStarts, text.substr(pos), pos, "mode")};
  } else {
    const std::size_t end = rest.find_first_of("-(");
    throw ParseError(std::string(rest.substr(0, end)), rest_pos, "unknown granularity");
  }
  return spec;
}

std::string format_variant(const VariantSpec& spec) {
  std::string out(to_string(spec.mode_pair));
  out += '-';
  std::visit(Overloaded{
                 [&](const ExperimentLevelSpec& e) {
                   out += "experiment-level-";
                   out += name_of(kStarts, e.mode);
                 },
                 [&](const StepLevelSpec& s) { out += "step-level-" + format_epsilon(s.epsilon); },
                 [&](const EpisodeLevelSpec&) { out += "episode-level-*"; },
                 [&](const IntraSpec& i) {
                   out += "intra(";
                   out += name_of(kDurations, i.explore_dur);
                   out += ',';
                   out += name_of(kTriggers, i.trigger);
                   out += ',';
                   out += name_of(kExploitParams, i.exploit);
                   out += ',';
                   out += name_of(kStarts, i.start);
                   out += ')';
                 },
             },
             spec.granularity);
  return out;
}

void validate_variant(const VariantSpec& spec) {
  if (const auto* s = std::get_if<StepLevelSpec>(&spec.granularity);
      s && !(s->epsilon > 0.0 && s->epsilon <= 1.0)) {
    throw ConfigError("step-level epsilon must lie in (0, 1]");
  }
  if (const auto* i = std::get_if<IntraSpec>(&spec.granularity);
      i && i->trigger == TriggerType::Informed && is_step_param(i->exploit)) {
    throw ConfigError("informed triggers take a target rate, not a step count");
  }
}

std::string describe_variant(const VariantSpec& spec) {
  std::ostringstream os;
  os << "variant: " << format_variant(spec) << '\n';
  os << "mode_pair: " << to_string(spec.mode_pair) << '\n';
  std::visit(Overloaded{
                 [&](const ExperimentLevelSpec& e) {
                   os << "granularity: experiment-level\n";
                   os << "mode: " << name_of(kStarts, e.mode) << '\n';
                 },
                 [&](const StepLevelSpec& s) {
                   os << "granularity: step-level\n";
                   os << "epsilon: " << format_epsilon(s.epsilon) << '\n';
                 },
                 [&](const EpisodeLevelSpec&) {
                   os << "granularity: episode-level\n";
                   os << "explore_probability: bandit\n";
                 },
                 [&](const IntraSpec& i) {
                   os << "granularity: intra\n";
                   os << "explore_duration: ";
                   if (i.explore_dur == ExploreDurToken::Bandit) {
                     os << "bandit{1,10,100}";
                   } else if (i.explore_dur == ExploreDurToken::Symmetric) {
                     os << "symmetric";
                   } else {
                     os << *fixed_explore_steps(i.explore_dur);
                   }
                   os << '\n';
                   os << "trigger: " << name_of(kTriggers, i.trigger) << '\n';
                   os << "exploit_param: ";
                   if (i.exploit == ExploitParam::NBandit) {
                     os << "bandit steps{10,100,1000,10000}";
                   } else if (i.exploit == ExploitParam::PBandit) {
                     os << (i.trigger == TriggerType::Informed ? "bandit target rate"
                                                              : "bandit probability")
                        << "{0.1,0.01,0.001,0.0001}";
                   } else if (is_step_param(i.exploit)) {
                     os << "steps " << static_cast<int>(*exploit_value(i.exploit));
                   } else {
                     os << (i.trigger == TriggerType::Informed ? "target rate " : "probability ")
                        << name_of(kExploitParams, i.exploit).substr(1);
                   }
                   os << '\n';
                   os << "start_mode: " << name_of(kStarts, i.start) << '\n';
                 },
             },
             spec.granularity);
  return os.str();
}

std::vector<VariantSpec> enumerate_variants() {
  static constexpr std::array<double, 6> kEpsilons{0.0001, 0.001, 0.01, 0.1, 0.4, 1.0};
  std::vector<VariantSpec> out;
  for (const auto& [mname, mode_pair] : kModePairs) {
    for (const auto& [sname, start] : kStarts) {
      out.push_back({mode_pair, ExperimentLevelSpec{start}});
    }
    for (const double eps : kEpsilons) out.push_back({mode_pair, StepLevelSpec{eps}});
    out.push_back({mode_pair, EpisodeLevelSpec{}});
    for (const auto& [dname, dur] : kDurations) {
      for (const auto& [tname, trigger] : kTriggers) {
        for (const auto& [ename, exploit] : kExploitParams) {
          if (trigger == TriggerType::Informed && is_step_param(exploit)) continue;
          for (const auto& [sname, start] : kStarts) {
            out.push_back({mode_pair, IntraSpec{dur, trigger, exploit, start}});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace modeswitch
