#pragma once

// The round loop, regret bookkeeping, theoretical bounds and the empirical
// audits built from the regret analysis.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ppcb/adversary.hpp"
#include "ppcb/agents.hpp"
#include "ppcb/mechanisms.hpp"
#include "ppcb/model.hpp"

namespace ppcb {

enum class RegretEstimator { kRealized, kExpected };

struct RunConfig {
  AuctionInstance instance;
  ExpertClass experts;
  MechanismOptions mechanism;
  std::vector<AgentPolicy> policies;  // one per agent
  AdversaryOptions adversary;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  RegretEstimator estimator = RegretEstimator::kExpected;

  /// Contextual mechanism only: replaces the learned estimates.
  std::optional<PiTable> pinned_estimates;

  bool keep_rounds = true;
  bool keep_curves = true;
  bool record_estimates = false;
};

/// Throws std::invalid_argument on the first inconsistency.
void validate_config(const RunConfig& config);

struct RoundRecord {
  std::uint64_t round = 0;
  ContextId context = 0;
  bool explore = false;
  AgentId arm = 0;
  int click = 0;
  int stochastic_click = 0;
  bool corrupted = false;
  double payment = 0.0;
  std::vector<double> bids;
  /// Largest best-response gain among alpha-rational agents; 0 if none.
  double max_gain = 0.0;
  std::uint32_t deviating_agents = 0;
};

/// Estimates in force from `round` on, until the next snapshot.
struct EstimateSnapshot {
  std::uint64_t round = 0;
  PiTable estimates;
};

struct AuditCounters {
  std::uint64_t explore_rounds = 0;
  std::uint64_t corrupted_rounds = 0;
  std::uint64_t deviation_rounds = 0;  // rounds where some agent misreported
  std::uint64_t payment_violations = 0;
  std::vector<std::uint64_t> corrupted_explore_per_arm;
  std::vector<std::uint64_t> explore_per_arm;
};

struct RunLog {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t num_agents = 0;
  MechanismKind mechanism = MechanismKind::kContextualGreedy;
  double epsilon = 0.0;
  ExpertId benchmark_expert = 0;
  double benchmark_per_round = 0.0;  // R(h*, mu)

  std::vector<RoundRecord> rounds;
  std::vector<double> regret_realized;  // cumulative, one entry per round
  std::vector<double> regret_expected;
  std::vector<EstimateSnapshot> estimate_trace;

  double welfare_realized = 0.0;     // sum c^t mu(a^t)
  double welfare_expected = 0.0;     // sum rho(a^t, x^t) mu(a^t)
  double welfare_uncorrupted = 0.0;  // realized welfare with the stochastic clicks
  AuditCounters audit;

  double benchmark_total() const { return static_cast<double>(horizon) * benchmark_per_round; }
  double final_regret(RegretEstimator estimator) const;
};

RunLog run(const RunConfig& config);

/// Runs `num_seeds` independent replicas with seeds derive_seed(config.seed, i),
/// spread over `threads` workers. Results are in seed-index order and do not
/// depend on the thread count.
std::vector<RunLog> run_many(const RunConfig& config, std::size_t num_seeds,
                             std::size_t threads = 1);

struct RegretSummary {
  std::size_t num_runs = 0;
  std::vector<double> mean_realized, std_realized;
  std::vector<double> mean_expected, std_expected;
  std::vector<double> final_realized, final_expected;

  double mean_final(RegretEstimator estimator) const;
  double std_final(RegretEstimator estimator) const;
};

/// Pointwise mean and sample standard deviation over runs, in input order.
/// Throws on an empty input or mismatched horizons.
RegretSummary regret_summary(std::span<const RunLog> logs);

// Theoretical bounds. Natural logarithms throughout.

struct CorruptionSlack {
  double statement = 0.0;  // C + max(C, 6 log T / eps)
  double proof = 0.0;      // C + max(C, 6 K log T / eps)
};
CorruptionSlack corruption_slack(std::size_t horizon, std::size_t num_agents, double epsilon,
                                 double corruption);

/// T eps + sqrt(8 K T log T / eps) + 24 K log T / eps + 2 (K + 1) + 4 C' log T,
/// with C' = C + max(C, 6 K log T / eps).
double theoretical_bound_stochastic(std::size_t horizon, std::size_t num_agents, double epsilon,
                                    double corruption);

struct ContextualBound {
  double statement = 0.0;  // with the headline C' = C + max(C, 6 log T / eps)
  double proof = 0.0;      // with the C' used in its proof
};
/// T eps + K^2 sqrt(8 T log(TmK) / eps) + 3K + 8 K^2 log(TmK) / (eps alpha^2)
///   + 16 C' / alpha + 4 K C' log T.
ContextualBound theoretical_bound_contextual(std::size_t horizon, std::size_t num_agents,
                                             std::size_t num_experts, double epsilon, double alpha,
                                             double corruption);

/// First round from which an alpha-rational agent is guaranteed truthful
/// (with C' = 0): 8 K^2 log(TmK) / (eps alpha^2).
double truthful_from_round(std::size_t horizon, std::size_t num_agents, std::size_t num_experts,
                           double epsilon, double alpha);

/// K sqrt(2 log(TmK) / (t eps)), the estimation error radius at round t.
double estimation_error_radius(std::size_t horizon, std::size_t num_agents,
                               std::size_t num_experts, double epsilon, std::uint64_t round);

struct ErrorAudit {
  std::uint64_t first_audited_round = 0;  // ceil(24 log T / eps), 1-based
  std::uint64_t checked_triples = 0;
  std::uint64_t violating_triples = 0;
  std::vector<bool> round_violates;  // indexed by 0-based round
  bool any_violation() const { return violating_triples > 0; }
};

/// Checks |Pi_hat^t(a,h) - Pi(a,h)| against the estimation error radius at
/// every (1-based) round t >= 24 log T / eps. Needs record_estimates.
ErrorAudit error_bound_audit(const RunLog& log, const PiTable& exact, double epsilon);

/// Stochastic mechanisms: rounds t >= 24 K log T / eps where some CTR
/// estimate misses rho(a) by more than sqrt(2K log T / (t eps)) + 2 C' / t.
ErrorAudit good_event_audit(const RunLog& log, std::span<const double> true_ctr, double epsilon,
                            double corruption);

/// Whether the explore count at T reached T eps / 2.
bool explore_fraction_ok(const RunLog& log);

/// Whether every arm received at most C' eps / K corrupted explore rounds.
bool corruption_concentration_ok(const RunLog& log, double corruption);

/// Least-squares slope of log(regret) against log(T). Needs at least three
/// horizons spanning a decade and positive regrets.
double scaling_fit(const std::map<std::size_t, double>& final_regrets);

}  // namespace ppcb
