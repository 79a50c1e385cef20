// modeswitch: run switching-exploration experiments and inspect variant names.
//
//   modeswitch run --variant "XU-intra(10,blind,n*,G)" --env deepsea:10 \
//       --episodes 5000 --seeds 1,2,3 --eval-every 50 --out results
//   modeswitch parse "XU-intra(100,informed,p*,X)"

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "modeswitch/errors.hpp"
#include "modeswitch/harness.hpp"
#include "modeswitch/varspec.hpp"

namespace {

modeswitch::SignalKind parse_signal(const std::string& name) {
  if (name == "promise") return modeswitch::SignalKind::ValuePromise;
  if (name == "mismatch") return modeswitch::SignalKind::ActionMismatch;
  if (name == "variance") return modeswitch::SignalKind::QVariance;
  throw modeswitch::ConfigError("unknown trigger signal '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode exploration with intra-episodic switching"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Train an agent and write CSV results");
  run->set_config("--config", "", "Flat key=value file; command-line flags override it");

  std::string variant_text;
  std::string env_text = "deepsea:10";
  std::string signal_text = "promise";
  modeswitch::ExperimentConfig config;
  std::string out_dir = "out";
  bool intrinsic = false;

  run->add_option("--variant", variant_text, "Variant name, e.g. XU-intra(10,blind,n100,G)")
      ->required();
  run->add_option("--env", env_text, "deepsea:<N> or chain:<N>")->capture_default_str();
  run->add_option("--episodes", config.total_episodes, "Training episodes per seed")
      ->capture_default_str();
  run->add_option("--seeds", config.seeds, "Comma-separated seeds")->delimiter(',');
  run->add_option("--eval-every", config.eval_every, "Evaluate the greedy policy every n episodes")
      ->capture_default_str();
  run->add_option("--eval-episodes", config.eval_episodes, "Episodes per evaluation")
      ->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--watkins-cut", config.learner.watkins_cut,
                  "Cut n-step returns at non-greedy actions (true/false)")
      ->capture_default_str();
  run->add_option("--ensemble", config.learner.ensemble_size, "Extrinsic Q heads")
      ->capture_default_str();
  run->add_option("--top-k", config.top_k, "Top-k size for the action-mismatch trigger")
      ->capture_default_str();
  run->add_option("--trigger-signal", signal_text, "promise | mismatch | variance")
      ->capture_default_str();
  run->add_option("--k", config.learner.k, "n-step horizon")->capture_default_str();
  run->add_option("--gamma", config.learner.gamma, "Discount")->capture_default_str();
  run->add_option("--alpha", config.learner.alpha, "Learning rate")->capture_default_str();
  run->add_option("--intrinsic", intrinsic, "Train the intrinsic head (always on for XI)");
  run->add_option("--parallel-seeds", config.parallel_seeds, "Run seeds on separate threads");
  run->add_option("--shared-bandit", config.shared_bandit, "Share bandits across seeds");
  run->add_option("--global-counts", config.global_counts, "Share visit counts across seeds");
  run->add_option("--dump-q", config.dump_q, "Write q_table.csv per seed");

  auto* parse = app.add_subcommand("parse", "Print the resolved form of a variant name");
  std::string parse_text;
  parse->add_option("variant", parse_text, "Variant name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*parse) {
      const auto spec = modeswitch::parse_variant(parse_text);
      modeswitch::validate_variant(spec);
      std::cout << modeswitch::describe_variant(spec);
      return 0;
    }
    config.variant = modeswitch::parse_variant(variant_text);
    config.env = modeswitch::parse_env_spec(env_text);
    config.trigger_signal = parse_signal(signal_text);
    config.learner.intrinsic_enabled = intrinsic;
    config.out_dir = out_dir;
    const auto dir = modeswitch::run_experiment(config);
    std::cout << "results written to " << dir.string() << '\n';
    return 0;
  } catch (const modeswitch::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
