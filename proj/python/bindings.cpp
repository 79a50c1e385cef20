#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "modeswitch/envs.hpp"
#include "modeswitch/errors.hpp"
#include "modeswitch/harness.hpp"
#include "modeswitch/meta_bandit.hpp"
#include "modeswitch/qlearner.hpp"
#include "modeswitch/stats.hpp"
#include "modeswitch/switching.hpp"
#include "modeswitch/varspec.hpp"

namespace py = pybind11;
namespace ms = modeswitch;

namespace {

std::vector<ms::EpisodeTrace> to_traces(const std::vector<std::string>& modes) {
  std::vector<ms::EpisodeTrace> out;
  out.reserve(modes.size());
  for (const auto& m : modes) out.push_back(ms::trace_from_string(m));
  return out;
}

ms::SignalKind signal_from_name(const std::string& name) {
  if (name == "promise") return ms::SignalKind::ValuePromise;
  if (name == "mismatch") return ms::SignalKind::ActionMismatch;
  if (name == "variance") return ms::SignalKind::QVariance;
  throw ms::ConfigError("unknown trigger signal '" + name + "'");
}

ms::ExperimentConfig make_config(const std::string& variant, const std::string& env,
                                 int episodes, std::vector<std::uint64_t> seeds, int eval_every,
                                 const std::string& out, bool watkins_cut, int ensemble,
                                 int top_k, const std::string& trigger_signal) {
  ms::ExperimentConfig c;
  c.variant = ms::parse_variant(variant);
  c.env = ms::parse_env_spec(env);
  c.total_episodes = episodes;
  c.seeds = std::move(seeds);
  c.eval_every = eval_every;
  c.out_dir = out;
  c.learner.watkins_cut = watkins_cut;
  c.learner.ensemble_size = ensemble;
  c.top_k = top_k;
  c.trigger_signal = signal_from_name(trigger_signal);
  return c;
}

}  // namespace

PYBIND11_MODULE(_modeswitch, m) {
  m.doc() = "Two-mode exploration with intra-episodic switching";
  m.attr("__version__") = "0.1.0";

  py::enum_<ms::Mode>(m, "Mode")
      .value("Exploit", ms::Mode::Exploit)
      .value("Explore", ms::Mode::Explore);

  // Variant names
  py::class_<ms::VariantSpec>(m, "VariantSpec")
      .def("__str__", [](const ms::VariantSpec& s) { return ms::format_variant(s); })
      .def("__repr__",
           [](const ms::VariantSpec& s) { return "VariantSpec('" + ms::format_variant(s) + "')"; })
      .def("__eq__", [](const ms::VariantSpec& a, const ms::VariantSpec& b) { return a == b; })
      .def_property_readonly("mode_pair",
                             [](const ms::VariantSpec& s) { return std::string(ms::to_string(s.mode_pair)); })
      .def("describe", [](const ms::VariantSpec& s) { return ms::describe_variant(s); });
  m.def("parse_variant", [](const std::string& text) { return ms::parse_variant(text); },
        py::arg("text"), "Parse a variant name; raises ValueError with the offending token");
  m.def("format_variant", &ms::format_variant, py::arg("spec"));
  m.def("enumerate_variants", [] {
    std::vector<std::string> out;
    for (const auto& s : ms::enumerate_variants()) out.push_back(ms::format_variant(s));
    return out;
  });

  // Environments
  py::class_<ms::Environment>(m, "Environment")
      .def(py::init([](const std::string& spec) { return ms::Environment(ms::parse_env_spec(spec)); }),
           py::arg("spec"))
      .def("reset", [](ms::Environment& e, std::uint64_t seed) {
             e.reset(seed);
             return e.observation();
           }, py::arg("seed") = 0)
      .def("step", [](ms::Environment& e, int action) {
             const auto out = e.step(action);
             return py::make_tuple(e.observation(), out.reward, out.terminal);
           }, py::arg("action"))
      .def_property_readonly("optimal_return",
                             [](const ms::Environment& e) { return ms::optimal_return(e.spec()); });

  // Learning primitives
  m.def("nstep_target",
        [](const std::vector<double>& rewards, double bootstrap, double gamma) {
          return ms::nstep_target(rewards, bootstrap, gamma);
        },
        py::arg("rewards"), py::arg("bootstrap"), py::arg("gamma"));
  m.def("effective_horizon",
        [](const std::vector<int>& actions, const std::vector<int>& greedy, bool cut) {
          return ms::effective_horizon(actions, greedy, cut);
        },
        py::arg("actions"), py::arg("greedy_actions"), py::arg("watkins_cut"));

  // Switching
  m.def("value_promise",
        [](double v_past, const std::vector<double>& rewards, double v_now, double gamma) {
          return ms::value_promise(v_past, rewards, v_now, gamma);
        },
        py::arg("v_past"), py::arg("rewards"), py::arg("v_now"), py::arg("gamma"));

  py::class_<ms::Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def("uniform", &ms::Rng::uniform);

  py::class_<ms::HomeostasisState>(m, "HomeostasisState")
      .def(py::init<>())
      .def_readonly("mean", &ms::HomeostasisState::mean)
      .def_readonly("variance", &ms::HomeostasisState::variance)
      .def_readonly("transformed_mean", &ms::HomeostasisState::transformed_mean)
      .def_readonly("t", &ms::HomeostasisState::t);
  m.def("homeostasis_step",
        [](const ms::HomeostasisState& h, double x, double rate, ms::Rng& rng) {
          const auto out = ms::homeostasis_step(h, x, rate, rng);
          return py::make_tuple(out.fire, out.next);
        },
        py::arg("state"), py::arg("x"), py::arg("target_rate"), py::arg("rng"));
  m.def("homeostasis_rate",
        [](const std::vector<double>& stream, double rate, std::uint64_t seed) {
          ms::Rng rng(seed);
          ms::HomeostasisState h;
          std::size_t fired = 0;
          for (double x : stream) {
            const auto out = ms::homeostasis_step(h, x, rate, rng);
            h = out.next;
            fired += out.fire ? 1 : 0;
          }
          return stream.empty() ? 0.0 : static_cast<double>(fired) / stream.size();
        },
        py::arg("stream"), py::arg("target_rate"), py::arg("seed") = 0,
        "Empirical switch rate of homeostasis over a whole stream");

  // Bandit
  py::class_<ms::BanditState>(m, "BanditState")
      .def(py::init([](std::size_t arms, double decay, double c) {
             return ms::BanditState::with_arms(arms, decay, c);
           }),
           py::arg("num_arms"), py::arg("decay") = 0.99, py::arg("exploration") = 1.0)
      .def_readonly("pulls", &ms::BanditState::pulls)
      .def_readonly("returns", &ms::BanditState::returns)
      .def("mean", &ms::BanditState::mean);
  m.def("bandit_sample", [](const ms::BanditState& b) {
    ms::Rng rng;
    return ms::bandit_sample(b, rng);
  });
  m.def("bandit_update", &ms::bandit_update, py::arg("state"), py::arg("arm"),
        py::arg("episodic_return"));

  // Statistics over traces given as "G"/"X" strings
  m.def("periods", [](const std::string& modes) {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& p : ms::periods(ms::trace_from_string(modes))) {
      out.emplace_back(std::string(1, ms::mode_char(p.mode)), p.length);
    }
    return out;
  });
  m.def("p_X", [](const std::vector<std::string>& t) { return ms::p_X(to_traces(t)); });
  m.def("med_X", [](const std::vector<std::string>& t) { return ms::med_X(to_traces(t)); });
  m.def("rmed_X", [](const std::vector<std::string>& t) { return ms::rmed_X(to_traces(t)); });

  // Experiments
  m.def("run_experiment",
        [](const std::string& variant, const std::string& env, int episodes,
           std::vector<std::uint64_t> seeds, int eval_every, const std::string& out,
           bool watkins_cut, int ensemble, int top_k, const std::string& trigger_signal) {
          auto c = make_config(variant, env, episodes, std::move(seeds), eval_every, out,
                               watkins_cut, ensemble, top_k, trigger_signal);
          py::gil_scoped_release release;
          return ms::run_experiment(c);
        },
        py::arg("variant"), py::arg("env"), py::arg("episodes"), py::arg("seeds"),
        py::arg("eval_every"), py::arg("out"), py::arg("watkins_cut") = false,
        py::arg("ensemble") = 1, py::arg("top_k") = 1, py::arg("trigger_signal") = "promise");
  m.def("final_scores",
        [](const std::string& variant, const std::string& env, int episodes,
           std::vector<std::uint64_t> seeds, bool watkins_cut) {
          auto c = make_config(variant, env, episodes, std::move(seeds), episodes, "", watkins_cut,
                               1, 1, "promise");
          c.record_traces = false;
          std::vector<double> out;
          {
            py::gil_scoped_release release;
            for (const auto& s : ms::train(c).seeds) out.push_back(s.final_normalized());
          }
          return out;
        },
        py::arg("variant"), py::arg("env"), py::arg("episodes"), py::arg("seeds"),
        py::arg("watkins_cut") = false,
        "Final normalized greedy score per seed, trained in memory");
}
