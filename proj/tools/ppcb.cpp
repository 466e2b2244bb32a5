// ppcb: run experiment presets from the command line.
//
//   ppcb <preset> [--config FILE] [overrides...] [--dry-run]
//
// Exit status: 0 when every evaluated criterion passes, 1 when one fails,
// 2 on a usage or configuration error, 3 on a runtime failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppcb/config.hpp"
#include "ppcb/presets.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string instance;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> threads;
  std::string output;
  std::vector<std::size_t> horizons;
  std::vector<std::uint64_t> corruption;
  std::vector<double> alphas;
  std::optional<double> epsilon;
  std::string epsilon_preset;
  std::string mechanism;
  std::optional<std::uint64_t> etc_length;
  std::string adversary;
  std::optional<std::uint64_t> budget;
  std::optional<std::size_t> target;
  std::optional<double> flip_prob;
  std::optional<double> alpha_rational;
  std::string estimator;
  bool exact_estimates = false;
  bool no_rounds = false;
  bool dry_run = false;
};

void add_flags(CLI::App& sub, Overrides& o) {
  sub.add_option("-c,--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub.add_option("--instance", o.instance, "JSON instance file")->check(CLI::ExistingFile);
  sub.add_option("--seed", o.seed, "top-level seed");
  sub.add_option("--seeds", o.seeds, "number of replicas")->check(CLI::PositiveNumber);
  sub.add_option("--threads", o.threads, "worker threads for replicas")->check(CLI::PositiveNumber);
  sub.add_option("-o,--output", o.output, "output directory");
  sub.add_option("--horizons", o.horizons, "horizons, strictly increasing")->delimiter(',');
  sub.add_option("--corruption", o.corruption, "corruption budgets C")->delimiter(',');
  sub.add_option("--alphas", o.alphas, "alpha values")->delimiter(',');
  sub.add_option("--epsilon", o.epsilon, "exploration rate");
  sub.add_option("--epsilon-preset", o.epsilon_preset,
                 "stochastic-proof, stochastic-statement or contextual");
  sub.add_option("--mechanism", o.mechanism,
                 "contextual-greedy, stochastic-greedy, explore-then-commit or perfect-info");
  sub.add_option("--etc-length", o.etc_length, "explore-then-commit explore length");
  sub.add_option("--adversary", o.adversary,
                 "none, suppress-best-first-c, boost-own, suppress-rival or random-flip");
  sub.add_option("--budget", o.budget, "adversary budget C");
  sub.add_option("--target", o.target, "agent targeted by boost-own or suppress-rival");
  sub.add_option("--flip-prob", o.flip_prob, "per-round corruption probability for random-flip");
  sub.add_option("--alpha-rational", o.alpha_rational, "make every agent alpha-rational");
  sub.add_option("--estimator", o.estimator, "expected or realized");
  sub.add_flag("--exact-estimates", o.exact_estimates, "pin estimates to the exact table");
  sub.add_flag("--no-rounds", o.no_rounds, "skip per-round CSVs");
  sub.add_flag("--dry-run", o.dry_run, "print the resolved spec and exit");
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "ppcb: " << message << '\n';
  std::exit(2);
}

ppcb::ExperimentSpec resolve(ppcb::Preset preset, const Overrides& o) {
  using namespace ppcb;
  ExperimentSpec spec;
  if (!o.config.empty()) {
    spec = parse_config(o.config, preset);
  } else {
    spec.preset = preset;
  }

  if (!o.instance.empty()) spec.instance_path = o.instance;
  if (o.seed) spec.seed = *o.seed;
  if (o.seeds) spec.seeds = *o.seeds;
  if (o.threads) spec.threads = *o.threads;
  if (!o.output.empty()) spec.output_dir = o.output;
  if (!o.horizons.empty()) spec.horizons = o.horizons;
  if (!o.corruption.empty()) spec.corruption = o.corruption;
  if (!o.alphas.empty()) spec.alphas = o.alphas;
  if (o.epsilon) spec.epsilon = *o.epsilon;
  if (!o.epsilon_preset.empty()) {
    const auto p = parse_epsilon_preset(o.epsilon_preset);
    if (!p) usage_error("--epsilon-preset: unknown preset \"" + o.epsilon_preset + "\"");
    spec.epsilon_preset = *p;
  }
  if (!o.mechanism.empty()) {
    const auto kind = parse_mechanism_kind(o.mechanism);
    if (!kind) usage_error("--mechanism: unknown mechanism \"" + o.mechanism + "\"");
    spec.mechanism = *kind;
  }
  if (o.etc_length) spec.etc_explore_length = *o.etc_length;
  if (!o.adversary.empty()) {
    const auto kind = parse_adversary_kind(o.adversary);
    if (!kind) usage_error("--adversary: unknown adversary \"" + o.adversary + "\"");
    spec.adversary.kind = *kind;
  }
  if (o.budget) spec.adversary.budget = *o.budget;
  if (o.target) spec.adversary.target = *o.target;
  if (o.flip_prob) spec.adversary.flip_prob = *o.flip_prob;
  if (o.alpha_rational) {
    try {
      spec.policies = {AgentPolicy::alpha_rational(*o.alpha_rational)};
    } catch (const std::invalid_argument& e) {
      usage_error(std::string("--alpha-rational: ") + e.what());
    }
  }
  if (!o.estimator.empty()) {
    if (o.estimator == "expected") {
      spec.estimator = RegretEstimator::kExpected;
    } else if (o.estimator == "realized") {
      spec.estimator = RegretEstimator::kRealized;
    } else {
      usage_error("--estimator: expected \"expected\" or \"realized\"");
    }
  }
  if (o.exact_estimates) spec.exact_estimates = true;
  if (o.no_rounds) spec.write_rounds = false;

  // The config's defaults were filled for this same preset, so only the
  // fields still unset change here.
  fill_defaults(spec);
  if (auto issues = validate_spec(spec); !issues.empty()) throw ConfigError(std::move(issues));
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for truthful bandit pay-per-click auctions"};
  app.require_subcommand(1);

  Overrides overrides;
  std::vector<std::pair<CLI::App*, ppcb::Preset>> subcommands;
  const std::vector<std::pair<ppcb::Preset, std::string>> descriptions = {
      {ppcb::Preset::kSimulate, "run a configured mechanism and write per-round CSVs"},
      {ppcb::Preset::kScaling, "regret of stochastic epsilon-greedy across horizons"},
      {ppcb::Preset::kCorruptionSweep, "explore-then-commit vs epsilon-greedy under corruption"},
      {ppcb::Preset::kTruthfulnessAudit, "best-response audit of alpha-rational agents"},
      {ppcb::Preset::kReplicateExample, "tables of the 3x3 worked example"},
      {ppcb::Preset::kAuditBounds, "empirical check of the estimation error bound"},
  };
  for (const auto& [preset, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(std::string(ppcb::to_string(preset)), text);
    add_flags(*sub, overrides);
    subcommands.emplace_back(sub, preset);
  }

  CLI11_PARSE(app, argc, argv);

  ppcb::Preset preset = ppcb::Preset::kSimulate;
  for (const auto& [sub, p] : subcommands) {
    if (sub->parsed()) preset = p;
  }

  ppcb::ExperimentSpec spec;
  try {
    spec = resolve(preset, overrides);
  } catch (const ppcb::ConfigError& e) {
    std::cerr << "ppcb: " << e.what() << '\n';
    return 2;
  }

  if (overrides.dry_run) {
    std::cout << ppcb::spec_to_json(spec);
    return 0;
  }

  try {
    const ppcb::PresetResult result = ppcb::run_preset(spec);
    std::cout << result.report;
    std::cout << "artifacts in " << spec.output_dir.string() << '\n';
    return result.passed() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ppcb: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ppcb: " << e.what() << '\n';
    return 3;
  }
}
