// guae: command-line front end for reward scoring, advantage estimation,
// GRPO simulation and collapse diagnostics.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "guae/commands.hpp"

namespace {

using guae::Settings;

struct Flags {
  Settings overrides;

  void value(CLI::App* app, const std::string& flag, const std::string& key, const std::string& desc) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides[key] = v; }, desc);
  }

  void toggle(CLI::App* app, const std::string& flag, const std::string& key, const std::string& val,
              const std::string& desc) {
    app->add_flag_callback(flag, [this, key, val] { overrides[key] = val; }, desc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guided advantage estimation lab: reward scoring, advantages, simulation, diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", guae::kToolVersion);

  std::optional<std::uint64_t> seed;
  std::optional<std::string> config_path;
  std::string out;
  app.add_option("--seed", seed, "Master random seed");
  app.add_option("--config", config_path, "Flat key = value config file (or a run manifest)")->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output file (score, advantage) or directory (simulate, diagnose)");

  Flags flags;
  std::string in;

  auto* score = app.add_subcommand("score", "Score predictions against references (JSONL in, JSONL out)");
  score->fallthrough();
  score->add_option("input,-i,--in", in, "Batch-scoring JSONL")->required();
  flags.value(score, "--lambda", "lambda", "Weight of action match vs consistency");
  flags.value(score, "--tau-click", "tau_click", "Click decay scale (normalized units)");
  flags.value(score, "--click-threshold", "click_threshold", "Maximum accepted click distance");
  flags.value(score, "--rho", "rho", "Partial credit for enumerated type-only matches");
  flags.value(score, "--text-grounding-min", "text_grounding_min", "Type grounding similarity threshold");
  flags.toggle(score, "--no-partial-credit", "enumerated_partial_credit", "false", "Score type-only matches 0");
  flags.toggle(score, "--strict", "strict_parse", "true", "Reject out-of-range coordinates");

  auto add_estimator_flags = [&](CLI::App* cmd) {
    flags.value(cmd, "--variant", "variant", "base | anchor-only | vat-only | guae");
    flags.value(cmd, "--epsilon", "epsilon", "Stabilizing constant");
    flags.value(cmd, "--sigma0", "sigma0", "Reference volatility");
    flags.value(cmd, "--tau-gate", "tau_gate", "Gate temperature");
    flags.value(cmd, "--p-low", "p_low", "Exponent for low-dispersion groups (> 1)");
    flags.value(cmd, "--p-high", "p_high", "Exponent for high-dispersion groups (< 1)");
    flags.toggle(cmd, "--sample-std", "population_std", "false", "Use n-1 for empirical group statistics");
  };

  auto* advantage = app.add_subcommand("advantage", "Compute advantages for rollout-group logs");
  advantage->fallthrough();
  advantage->add_option("input,-i,--in", in, "Group-log JSONL")->required();
  add_estimator_flags(advantage);

  auto* simulate = app.add_subcommand("simulate", "Train the toy softmax policy and write traces");
  simulate->fallthrough();
  add_estimator_flags(simulate);
  flags.value(simulate, "--compare", "compare", "Comma-separated estimators sharing one random stream");
  flags.value(simulate, "--steps", "steps", "Training steps");
  flags.value(simulate, "-K,--group-size", "K", "Rollouts per state per step");
  flags.value(simulate, "--beta", "beta", "KL coefficient");
  flags.value(simulate, "--learning-rate", "learning_rate", "Gradient ascent step size");
  flags.value(simulate, "--temperature", "temperature", "Sampling temperature");
  flags.value(simulate, "--states", "n_states", "Number of bandit states");
  flags.value(simulate, "--actions", "n_actions", "Actions per state");
  flags.value(simulate, "--init", "init", "uniform | correct | wrong");
  flags.value(simulate, "--init-mass", "init_mass", "Probability mass of the favoured initial action");
  flags.value(simulate, "--reward-correct", "reward_correct", "Reward for the target action");
  flags.value(simulate, "--reward-wrong", "reward_wrong", "Reward for other actions");
  flags.value(simulate, "--schedule", "schedule", "Comma-separated collapse probabilities (writes collapse.csv)");
  flags.value(simulate, "--schedule-groups", "schedule_groups", "Groups per schedule point");

  auto* diagnose = app.add_subcommand("diagnose", "Collapse diagnostics over group logs or advantage reports");
  diagnose->fallthrough();
  diagnose->add_option("input,-i,--in", in, "Group-log or advantage-report JSONL")->required();
  add_estimator_flags(diagnose);
  flags.value(diagnose, "--low-std-threshold", "low_std_threshold", "Group sigma below this counts as low-std");
  flags.value(diagnose, "--deltas", "deltas", "Comma-separated near-zero thresholds");

  CLI11_PARSE(app, argc, argv);

  if (out.empty()) {
    std::cerr << "error: --out is required\n";
    return guae::kExitConfig;
  }

  Settings settings;
  if (config_path) {
    try {
      settings = guae::load_settings_file(*config_path);
    } catch (const guae::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.code() == guae::ErrorCode::FileNotFound ? guae::kExitIo : guae::kExitConfig;
    }
  }
  for (const auto& [k, v] : flags.overrides) settings[k] = v;
  if (seed) settings["seed"] = std::to_string(*seed);

  if (score->parsed()) return guae::cmd_score(in, out, settings);
  if (advantage->parsed()) return guae::cmd_advantage(in, out, settings);
  if (simulate->parsed()) return guae::cmd_simulate(out, settings);
  if (diagnose->parsed()) return guae::cmd_diagnose(in, out, settings);
  return guae::kExitConfig;
}
