#pragma once

// Reproducible experiments, each evaluating one acceptance criterion. The
// CLI presets and the acceptance suite both call into here, so the
// thresholds live in one place.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppcb/agents.hpp"
#include "ppcb/io.hpp"
#include "ppcb/simulator.hpp"

namespace ppcb {

struct Metric {
  std::string name;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<Metric> metrics;

  double metric(const std::string& name) const;
};

/// "[PASS] criterion N: name -- detail"
std::string format_result(const CriterionResult& result);

/// A truthful policy for every agent.
std::vector<AgentPolicy> truthful_policies(std::size_t num_agents);

RunConfig basic_config(const AuctionInstance& instance, const ExpertClass& experts,
                       MechanismOptions mechanism, std::size_t horizon, std::uint64_t seed);

// Fixtures of the acceptance suite.

/// K = 3, mu = (0.9, 0.6, 0.3), rho = (0.5, 0.7, 0.9).
AuctionInstance scaling_fixture(std::size_t horizon);
/// K = 2, mu = (1, 0.3), rho = (0.9, 0.8).
AuctionInstance corruption_fixture(std::size_t horizon);

// 1. Regret scaling of stochastic epsilon-greedy.
struct ScalingParams {
  std::vector<std::size_t> horizons = {10000, 40000, 160000};
  std::size_t seeds = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double slope_lo = 0.55;
  double slope_hi = 0.80;
  std::optional<AuctionInstance> instance;  // default: scaling_fixture
  std::optional<double> epsilon;            // default: stochastic proof preset per T
};
struct ScalingOutcome {
  CriterionResult result;
  std::map<std::size_t, double> mean_regret;
  std::map<std::size_t, double> std_regret;
  std::map<std::size_t, double> bound;
  std::map<std::size_t, double> epsilon;
  double slope = 0.0;
  std::vector<RunLog> logs;  // final-horizon runs only, without rounds
};
ScalingOutcome evaluate_regret_scaling(const ScalingParams& params);

// 2. Corruption robustness against explore-then-commit.
struct CorruptionParams {
  std::size_t horizon = 100000;
  std::size_t seeds = 30;
  std::uint64_t seed = 2;
  std::size_t threads = 1;
  /// Further budgets to sweep after ETC's explore length.
  std::vector<std::uint64_t> budgets = {};
  double etc_fraction = 0.3;
  std::optional<AuctionInstance> instance;  // default: corruption_fixture
  std::optional<double> epsilon;
  std::optional<std::uint64_t> etc_explore_length;  // default: round(eps T)
};
struct CorruptionPoint {
  std::uint64_t budget = 0;
  double etc_mean = 0.0;
  double greedy_mean = 0.0;
  double greedy_bound = 0.0;
  double etc_mean_realized = 0.0;
  double greedy_mean_realized = 0.0;
  std::size_t etc_wrong_commits = 0;
};
struct CorruptionOutcome {
  CriterionResult result;
  std::uint64_t etc_explore_length = 0;
  double epsilon = 0.0;
  double welfare_gap = 0.0;
  std::vector<CorruptionPoint> points;  // points[0] is the acceptance budget
};
/// ETC explore length matched to the expected explore count of epsilon-greedy.
std::uint64_t default_etc_explore_length(std::size_t horizon, std::size_t num_agents);
CorruptionOutcome evaluate_corruption_robustness(const CorruptionParams& params);

// 3. Truthfulness of the exact envelope payment.
struct MyersonParams {
  std::size_t profiles = 20;
  std::size_t value_steps = 100;  // values k / value_steps
  std::uint64_t seed = 3;
};
CriterionResult evaluate_myerson_truthfulness(const MyersonParams& params);

// 4. The perturbed-payment counterexample.
struct CounterexampleOutcome {
  CriterionResult result;
  BestResponse low;   // value 0.301
  BestResponse high;  // value 0.599
};
CounterexampleOutcome evaluate_perturbed_counterexample();

// 5. Estimation error bound.
struct ErrorBoundParams {
  std::size_t horizon = 10000;
  double epsilon = 0.2;
  std::size_t seeds = 200;
  std::uint64_t seed = 5;
  std::size_t threads = 1;
  std::optional<InstanceFile> instance;  // default: the worked example
};
struct ErrorBoundOutcome {
  CriterionResult result;
  std::size_t violating_runs = 0;
  double threshold = 0.0;
  std::size_t explore_fraction_failures = 0;
};
ErrorBoundOutcome evaluate_error_bound(const ErrorBoundParams& params);

// 6. Alpha-rational agents become truthful; 10. contextual regret ceiling.
struct RationalParams {
  std::size_t horizon = 10000;
  double epsilon = 0.2;
  double alpha = 0.05;
  std::size_t seeds = 100;
  std::uint64_t seed = 6;
  std::size_t threads = 1;
  std::optional<InstanceFile> instance;
  /// Pin the mechanism's estimates to the exact click probabilities.
  bool exact_estimates = false;
};
struct RationalOutcome {
  CriterionResult result;
  CriterionResult ceiling;
  double alpha_used = 0.0;
  double truthful_from = 0.0;
  double requested_truthful_from = 0.0;
  std::vector<double> per_run_fraction;  // post-threshold rounds with gain > alpha
  std::size_t post_rounds = 0;
  std::size_t violating_rounds = 0;
  std::size_t truthful_rounds = 0;  // rounds where nobody misreported
  std::size_t total_rounds = 0;
  double mean_regret = 0.0;
  ContextualBound bound;
};
/// The alpha actually audited: `alpha` if its truthfulness threshold fits in
/// half the horizon, otherwise the smallest alpha whose threshold does.
double rescaled_alpha(std::size_t horizon, std::size_t num_agents, std::size_t num_experts,
                      double epsilon, double alpha);
RationalOutcome evaluate_alpha_rational(const RationalParams& params);

}  // namespace ppcb
