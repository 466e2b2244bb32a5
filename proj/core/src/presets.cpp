#include "ppcb/presets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppcb {
namespace {

namespace fs = std::filesystem;

std::string criteria_csv(const std::vector<CriterionResult>& criteria) {
  std::ostringstream out;
  out << "criterion,name,passed,metric,value\n";
  for (const auto& c : criteria) {
    for (const auto& m : c.metrics) {
      out << c.id << ',' << c.name << ',' << (c.passed ? 1 : 0) << ',' << m.name << ','
          << format_number(m.value) << '\n';
    }
  }
  return out.str();
}

class Artifacts {
 public:
  Artifacts(const fs::path& dir, PresetResult& result) : dir_(dir), result_(result) {}

  void write(const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    write_text_file(path, contents);
    result_.artifacts.push_back(path);
  }

 private:
  fs::path dir_;
  PresetResult& result_;
};

std::string header(const ExperimentSpec& spec, const std::string& criteria) {
  std::ostringstream out;
  out << "preset: " << to_string(spec.preset) << '\n'
      << "evaluates: " << criteria << '\n'
      << "seed: " << spec.seed.value_or(0) << ", seeds: " << spec.seeds << '\n';
  return out.str();
}

void finish(PresetResult& result, std::ostringstream& report, Artifacts& artifacts) {
  for (const auto& c : result.criteria) report << format_result(c) << '\n';
  report << "overall: " << (result.passed() ? "PASS" : "FAIL") << '\n';
  result.report = report.str();
  if (!result.criteria.empty()) artifacts.write("criteria.csv", criteria_csv(result.criteria));
  artifacts.write("report.txt", result.report);
}

std::size_t first_horizon(const ExperimentSpec& spec, std::size_t fallback) {
  return spec.horizons.empty() ? fallback : spec.horizons.front();
}

PresetResult run_simulate(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  const InstanceFile instance = resolve_instance(spec);
  const RunConfig config = simulate_config(spec, instance);
  const std::vector<RunLog> logs = run_many(config, spec.seeds, spec.threads);

  if (spec.write_rounds) {
    for (std::size_t i = 0; i < logs.size(); ++i) {
      std::ostringstream csv;
      write_round_csv(csv, logs[i]);
      artifacts.write("rounds_" + std::to_string(i) + ".csv", csv.str());
    }
  }
  std::ostringstream summary;
  write_summary_csv(summary, logs);
  artifacts.write("summary.csv", summary.str());

  const RegretSummary stats = regret_summary(logs);
  std::ostringstream report;
  report << header(spec, "none (free-form simulation)")
         << "mechanism: " << to_string(config.mechanism.kind)
         << ", epsilon: " << format_number(config.mechanism.epsilon)
         << ", horizon: " << config.horizon << '\n'
         << "adversary: " << to_string(config.adversary.kind)
         << ", budget: " << config.adversary.budget << '\n'
         << "mean final regret (expected): "
         << format_number(stats.mean_final(RegretEstimator::kExpected)) << " +- "
         << format_number(stats.std_final(RegretEstimator::kExpected)) << '\n'
         << "mean final regret (realized): "
         << format_number(stats.mean_final(RegretEstimator::kRealized)) << " +- "
         << format_number(stats.std_final(RegretEstimator::kRealized)) << '\n';
  std::uint64_t payment_violations = 0;
  for (const auto& log : logs) payment_violations += log.audit.payment_violations;
  report << "payment violations: " << payment_violations << '\n';
  finish(result, report, artifacts);
  return result;
}

PresetResult run_scaling(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  ScalingParams params;
  params.horizons = spec.horizons;
  params.seeds = spec.seeds;
  params.seed = *spec.seed;
  params.threads = spec.threads;
  params.epsilon = spec.epsilon;
  if (spec.instance_path) params.instance = resolve_instance(spec).instance;
  ScalingOutcome outcome = evaluate_regret_scaling(params);
  result.criteria.push_back(outcome.result);

  std::ostringstream table;
  table << "horizon,epsilon,mean_regret,std_regret,bound\n";
  for (const auto& [horizon, mean] : outcome.mean_regret) {
    table << horizon << ',' << format_number(outcome.epsilon[horizon]) << ',' << format_number(mean)
          << ',' << format_number(outcome.std_regret[horizon]) << ','
          << format_number(outcome.bound[horizon]) << '\n';
  }
  artifacts.write("scaling.csv", table.str());
  std::ostringstream summary;
  write_summary_csv(summary, outcome.logs);
  artifacts.write("summary.csv", summary.str());

  std::ostringstream report;
  report << header(spec, "criterion 1 (regret scaling)")
         << "fitted log-log slope: " << format_number(outcome.slope) << '\n';
  finish(result, report, artifacts);
  return result;
}

PresetResult run_corruption_sweep(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  CorruptionParams params;
  params.horizon = first_horizon(spec, params.horizon);
  params.seeds = spec.seeds;
  params.seed = *spec.seed;
  params.threads = spec.threads;
  params.budgets = spec.corruption;
  params.epsilon = spec.epsilon;
  params.etc_explore_length = spec.etc_explore_length;
  if (spec.instance_path) params.instance = resolve_instance(spec).instance;
  const CorruptionOutcome outcome = evaluate_corruption_robustness(params);
  result.criteria.push_back(outcome.result);

  std::ostringstream table;
  table << "budget,etc_mean_regret,greedy_mean_regret,etc_mean_regret_realized,"
           "greedy_mean_regret_realized,greedy_bound,etc_wrong_commits\n";
  for (const auto& p : outcome.points) {
    table << p.budget << ',' << format_number(p.etc_mean) << ',' << format_number(p.greedy_mean)
          << ',' << format_number(p.etc_mean_realized) << ','
          << format_number(p.greedy_mean_realized) << ',' << format_number(p.greedy_bound) << ','
          << p.etc_wrong_commits << '\n';
  }
  artifacts.write("corruption.csv", table.str());

  std::ostringstream report;
  report << header(spec, "criterion 2 (corruption robustness against explore-then-commit)")
         << "epsilon: " << format_number(outcome.epsilon)
         << ", ETC explore length: " << outcome.etc_explore_length
         << ", welfare gap: " << format_number(outcome.welfare_gap) << '\n';
  for (const auto& p : outcome.points) {
    report << "C=" << p.budget << ": ETC " << format_number(p.etc_mean) << ", epsilon-greedy "
           << format_number(p.greedy_mean);
    if (p.greedy_mean > 0.0) report << ", ratio " << format_number(p.etc_mean / p.greedy_mean);
    report << '\n';
  }
  finish(result, report, artifacts);
  return result;
}

PresetResult run_truthfulness_audit(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  std::optional<InstanceFile> instance;
  if (spec.instance_path) instance = resolve_instance(spec);

  if (!instance) result.criteria.push_back(evaluate_myerson_truthfulness({}));
  std::ostringstream table;
  table << "alpha,alpha_used,threshold,run,violation_fraction\n";
  std::ostringstream report;
  report << header(spec, instance ? "criteria 6 and 10 (alpha-rational truthfulness, regret ceiling)"
                                  : "criteria 3, 6 and 10 (exact-payment truthfulness, "
                                    "alpha-rational truthfulness, regret ceiling)");
  for (double alpha : spec.alphas) {
    RationalParams params;
    params.horizon = first_horizon(spec, params.horizon);
    params.epsilon = *spec.epsilon;
    params.alpha = alpha;
    params.seeds = spec.seeds;
    params.seed = *spec.seed;
    params.threads = spec.threads;
    params.instance = instance;
    params.exact_estimates = spec.exact_estimates;
    const RationalOutcome outcome = evaluate_alpha_rational(params);
    result.criteria.push_back(outcome.result);
    result.criteria.push_back(outcome.ceiling);
    for (std::size_t i = 0; i < outcome.per_run_fraction.size(); ++i) {
      table << format_number(alpha) << ',' << format_number(outcome.alpha_used) << ','
            << format_number(outcome.truthful_from) << ',' << i << ','
            << format_number(outcome.per_run_fraction[i]) << '\n';
    }
    const double truthful = outcome.total_rounds
                                ? 100.0 * static_cast<double>(outcome.truthful_rounds) /
                                      static_cast<double>(outcome.total_rounds)
                                : 100.0;
    report << "alpha " << format_number(alpha) << ": truthful rounds " << format_number(truthful)
           << "% of " << outcome.total_rounds << '\n';
  }
  artifacts.write("truthfulness.csv", table.str());
  finish(result, report, artifacts);
  return result;
}

PresetResult run_replicate_example(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  const CounterexampleOutcome outcome = evaluate_perturbed_counterexample();
  result.criteria.push_back(outcome.result);

  const AuctionInstance instance = example_instance();
  const PiTable exact = exact_pi_table(instance, example_experts());
  const std::vector<double> bids = {0.7, 0.1, 0.2};
  const Envelope env = build_envelope(exact, bids, 0);
  const auto perturbation = example_payment_perturbation();
  const PaymentRule exact_rule(env);
  const PaymentRule perturbed_rule(env, perturbation);

  std::ostringstream g_table;
  g_table << "segment,start,end,expert,g\n";
  for (std::size_t k = 0; k < env.num_segments(); ++k) {
    const double end = k < env.breakpoints.size() ? env.breakpoints[k] : 1.0;
    g_table << k << ',' << format_number(env.segment_start(k)) << ',' << format_number(end) << ','
            << env.segment_expert[k] << ',' << format_number(env.segment_g[k]) << '\n';
  }
  artifacts.write("g_table.csv", g_table.str());

  const MechanismSnapshot exact_snapshot{exact, exact};
  const MechanismSnapshot perturbed_snapshot{exact, exact, perturbation};
  const std::vector<double> values = {0.301, 0.599};
  std::vector<UtilityCurve> curves;
  for (double v : values) {
    curves.emplace_back(exact_snapshot, bids, 0, v);
    curves.emplace_back(perturbed_snapshot, bids, 0, v);
  }

  std::ostringstream payments, utilities;
  payments << "bid,g,payment_exact,payment_perturbed\n";
  utilities << "bid,u_exact_0.301,u_perturbed_0.301,u_exact_0.599,u_perturbed_0.599\n";
  for (int k = 0; k <= 1000; ++k) {
    const double b = k / 1000.0;
    payments << format_number(b) << ',' << format_number(env.g(b)) << ','
             << format_number(exact_rule(b)) << ',' << format_number(perturbed_rule(b)) << '\n';
    utilities << format_number(b);
    for (const auto& u : curves) utilities << ',' << format_number(u(b));
    utilities << '\n';
  }
  artifacts.write("payment_curve.csv", payments.str());
  artifacts.write("utility.csv", utilities.str());

  std::ostringstream report;
  report << header(spec, "criterion 4 (perturbed-payment counterexample)")
         << "others' bids: 0.1, 0.2; breakpoints:";
  for (double bp : env.breakpoints) report << ' ' << format_number(bp);
  report << '\n';
  for (double v : values) {
    const BestResponse e = best_response(exact_snapshot, bids, 0, v);
    const BestResponse p = best_response(perturbed_snapshot, bids, 0, v);
    report << "value " << format_number(v) << ": exact payment best bid " << format_number(e.best_bid)
           << " gain " << format_number(e.gain) << "; perturbed best bid "
           << format_number(p.best_bid) << " gain " << format_number(p.gain) << '\n';
  }
  finish(result, report, artifacts);
  return result;
}

PresetResult run_audit_bounds(const ExperimentSpec& spec) {
  PresetResult result;
  Artifacts artifacts(spec.output_dir, result);
  ErrorBoundParams params;
  params.horizon = first_horizon(spec, params.horizon);
  params.epsilon = *spec.epsilon;
  params.seeds = spec.seeds;
  params.seed = *spec.seed;
  params.threads = spec.threads;
  if (spec.instance_path) params.instance = resolve_instance(spec);
  const ErrorBoundOutcome outcome = evaluate_error_bound(params);
  result.criteria.push_back(outcome.result);

  std::ostringstream report;
  report << header(spec, "criterion 5 (estimation error bound)")
         << "runs where the explore count fell below T eps / 2: " << outcome.explore_fraction_failures
         << '\n';
  finish(result, report, artifacts);
  return result;
}

}  // namespace

bool PresetResult::passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

InstanceFile resolve_instance(const ExperimentSpec& spec) {
  if (spec.instance_path) return load_instance(*spec.instance_path);
  switch (spec.preset) {
    case Preset::kScaling:
      return {scaling_fixture(first_horizon(spec, 10000)), constant_experts(3, 1)};
    case Preset::kCorruptionSweep:
      return {corruption_fixture(first_horizon(spec, 100000)), constant_experts(2, 1)};
    default:
      return {example_instance(first_horizon(spec, 10000)), example_experts()};
  }
}

double resolve_epsilon(const ExperimentSpec& spec, const InstanceFile& file, std::size_t horizon) {
  if (spec.epsilon) return *spec.epsilon;
  const std::size_t K = file.instance.num_agents;
  EpsilonPreset preset = EpsilonPreset::kContextual;
  if (spec.epsilon_preset) {
    preset = *spec.epsilon_preset;
  } else if (spec.mechanism == MechanismKind::kStochasticGreedy ||
             spec.mechanism == MechanismKind::kExploreThenCommit) {
    preset = EpsilonPreset::kStochasticProof;
  }
  switch (preset) {
    case EpsilonPreset::kStochasticProof:
      return epsilon_stochastic_proof(horizon, K);
    case EpsilonPreset::kStochasticStatement:
      return epsilon_stochastic_statement(horizon, K);
    case EpsilonPreset::kContextual:
      break;
  }
  return epsilon_contextual(horizon, file.experts.num_experts(), K);
}

RunConfig simulate_config(const ExperimentSpec& spec, const InstanceFile& file) {
  const std::size_t horizon = first_horizon(spec, file.instance.horizon);
  const double eps = resolve_epsilon(spec, file, horizon);
  MechanismOptions mechanism{spec.mechanism, eps, 0};
  mechanism.etc_explore_length =
      spec.etc_explore_length
          ? *spec.etc_explore_length
          : static_cast<std::uint64_t>(std::llround(eps * static_cast<double>(horizon)));
  RunConfig config = basic_config(file.instance, file.experts, mechanism, horizon, spec.seed.value_or(0));

  const std::size_t K = file.instance.num_agents;
  if (spec.policies.size() == 1) {
    config.policies.assign(K, spec.policies.front());
  } else if (spec.policies.size() == K) {
    config.policies = spec.policies;
  } else if (!spec.policies.empty()) {
    throw std::invalid_argument("policies: expected 1 or " + std::to_string(K) + " entries, got " +
                                std::to_string(spec.policies.size()));
  }
  config.adversary = spec.adversary;
  config.estimator = spec.estimator;
  if (spec.exact_estimates) config.pinned_estimates = exact_pi_table(file.instance, file.experts);
  config.keep_rounds = spec.write_rounds;
  config.keep_curves = spec.write_rounds;
  validate_config(config);
  return config;
}

PresetResult run_preset(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  fill_defaults(spec);
  if (auto issues = validate_spec(spec); !issues.empty()) throw ConfigError(std::move(issues));
  switch (spec.preset) {
    case Preset::kSimulate:
      return run_simulate(spec);
    case Preset::kScaling:
      return run_scaling(spec);
    case Preset::kCorruptionSweep:
      return run_corruption_sweep(spec);
    case Preset::kTruthfulnessAudit:
      return run_truthfulness_audit(spec);
    case Preset::kReplicateExample:
      return run_replicate_example(spec);
    case Preset::kAuditBounds:
      return run_audit_bounds(spec);
  }
  throw std::logic_error("unhandled preset");
}

}  // namespace ppcb
