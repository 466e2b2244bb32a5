#include "ppcb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ppcb {
namespace {

ContextId sample_context(std::span<const double> probs, Stream stream) {
  const double u = stream.uniform();
  double cumulative = 0.0;
  for (ContextId x = 0; x + 1 < probs.size(); ++x) {
    cumulative += probs[x];
    if (u < cumulative) return x;
  }
  return probs.size() - 1;
}

AgentId welfare_best_arm(const AuctionInstance& instance) {
  AgentId best = 0;
  double best_score = -1.0;
  for (AgentId a = 0; a < instance.num_agents; ++a) {
    const double s = instance.values[a] * stochastic_ctr(instance, a);
    if (s > best_score) {
      best = a;
      best_score = s;
    }
  }
  return best;
}

double log_of(std::size_t x) { return std::log(static_cast<double>(x)); }

// The bids an agent's opponents intend to report: alpha-rational agents are
// assumed truthful when someone else computes a best response.
std::vector<double> intended_bids(const RunConfig& config) {
  std::vector<double> bids(config.instance.num_agents);
  for (AgentId a = 0; a < bids.size(); ++a) {
    const auto& policy = config.policies[a];
    bids[a] = policy.kind == AgentPolicy::Kind::kFixedBid ? policy.fixed_bid
                                                           : config.instance.values[a];
  }
  return bids;
}

// Welford update of a running mean / M2 pair.
void welford(double value, std::size_t n, double& mean, double& m2) {
  const double delta = value - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (value - mean);
}

}  // namespace

void validate_config(const RunConfig& config) {
  // The run length is config.horizon; T = 0 is a valid, empty run.
  AuctionInstance shape = config.instance;
  shape.horizon = std::max<std::size_t>(shape.horizon, 1);
  require_valid(shape, config.experts);
  if (config.policies.size() != config.instance.num_agents) {
    throw std::invalid_argument("exactly one agent policy per agent is required");
  }
  for (const auto& p : config.policies) {
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("alpha outside [0,1]");
    if (!(p.fixed_bid >= 0.0 && p.fixed_bid <= 1.0)) {
      throw std::invalid_argument("fixed bid outside [0,1]");
    }
  }
  const auto kind = config.mechanism.kind;
  if (kind == MechanismKind::kContextualGreedy || kind == MechanismKind::kStochasticGreedy) {
    const double eps = config.mechanism.epsilon;
    if (!(eps > 0.0 && eps < 1.0) && !(eps == 0.0 && config.pinned_estimates) &&
        !(eps == 1.0)) {
      throw std::invalid_argument("epsilon must lie in (0,1)");
    }
  }
  if (config.pinned_estimates && kind != MechanismKind::kContextualGreedy) {
    throw std::invalid_argument("pinned estimates need the contextual mechanism");
  }
}

double RunLog::final_regret(RegretEstimator estimator) const {
  const double welfare =
      estimator == RegretEstimator::kRealized ? welfare_realized : welfare_expected;
  return benchmark_total() - welfare;
}

RunLog run(const RunConfig& config) {
  validate_config(config);
  const AuctionInstance& instance = config.instance;
  const std::size_t K = instance.num_agents;
  const ExpertClass experts = mechanism_experts(config.mechanism.kind, instance, config.experts);
  const PiTable exact = exact_pi_table(instance, experts);

  auto mechanism = make_mechanism(config.mechanism, instance, experts);
  if (config.pinned_estimates) {
    static_cast<ContextualGreedy&>(*mechanism).pin_estimates(*config.pinned_estimates);
  }
  Adversary adversary(config.adversary, K, welfare_best_arm(instance));

  RunLog log;
  log.seed = config.seed;
  log.horizon = config.horizon;
  log.num_agents = K;
  log.mechanism = config.mechanism.kind;
  log.epsilon = config.mechanism.epsilon;
  log.benchmark_expert = best_expert(exact, instance.values);
  log.benchmark_per_round = reported_welfare(exact, log.benchmark_expert, instance.values);
  log.audit.corrupted_explore_per_arm.assign(K, 0);
  log.audit.explore_per_arm.assign(K, 0);
  log.rounds.reserve(config.horizon);
  if (config.keep_curves) {
    log.regret_realized.reserve(config.horizon);
    log.regret_expected.reserve(config.horizon);
  }

  const std::vector<double> baseline_bids = intended_bids(config);
  const bool any_rational =
      std::any_of(config.policies.begin(), config.policies.end(),
                  [](const AgentPolicy& p) { return p.kind == AgentPolicy::Kind::kAlphaRational; });
  const bool any_adversary =
      config.adversary.kind != AdversaryKind::kNone && config.adversary.budget > 0;

  // Best responses only change when the estimates do.
  std::vector<BestResponse> responses(K);
  std::optional<std::uint64_t> cached_version;

  if (config.record_estimates) log.estimate_trace.push_back({0, mechanism->estimates()});
  std::uint64_t last_version = mechanism->estimate_version();

  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    const RoundStreams streams(config.seed, t);
    RoundRecord rec;
    rec.round = t;
    rec.context = sample_context(instance.context_probs, streams.stream(Purpose::kContext));

    rec.bids = baseline_bids;
    if (any_rational) {
      if (cached_version != mechanism->estimate_version()) {
        const PiTable estimated = mechanism->estimates();
        const MechanismSnapshot snapshot{estimated, exact};
        for (AgentId a = 0; a < K; ++a) {
          if (config.policies[a].kind != AgentPolicy::Kind::kAlphaRational) continue;
          responses[a] = best_response(snapshot, baseline_bids, a, instance.values[a]);
        }
        cached_version = mechanism->estimate_version();
      }
      for (AgentId a = 0; a < K; ++a) {
        if (config.policies[a].kind != AgentPolicy::Kind::kAlphaRational) continue;
        rec.max_gain = std::max(rec.max_gain, responses[a].gain);
        rec.bids[a] = choose_bid(config.policies[a], instance.values[a], &responses[a]);
        if (rec.bids[a] != instance.values[a]) ++rec.deviating_agents;
      }
      if (rec.deviating_agents > 0) ++log.audit.deviation_rounds;
    }

    CorruptionPlan plan;
    if (any_adversary && adversary.budget_remaining() > 0) {
      const auto dist = mechanism->arm_distribution(rec.bids, instance.context_probs);
      plan = adversary.plan(log.rounds, dist, streams);
    }

    const ArmDraft draft = mechanism->step(rec.bids, rec.context, streams);
    rec.arm = draft.arm;
    rec.explore = draft.explore;

    auto click_stream = streams.stream(Purpose::kClick);
    rec.stochastic_click = click_stream.bernoulli(instance.click_rate(rec.arm, rec.context)) ? 1 : 0;
    const AppliedClick applied = apply(plan, rec.arm, rec.stochastic_click);
    rec.click = applied.click;
    rec.corrupted = applied.corrupted;

    rec.payment = mechanism->observe(rec.bids, rec.context, draft, rec.click);

    const double value = instance.values[rec.arm];
    log.welfare_realized += rec.click * value;
    log.welfare_expected += instance.click_rate(rec.arm, rec.context) * value;
    log.welfare_uncorrupted += rec.stochastic_click * value;
    if (config.keep_curves) {
      const double benchmark = static_cast<double>(t + 1) * log.benchmark_per_round;
      log.regret_realized.push_back(benchmark - log.welfare_realized);
      log.regret_expected.push_back(benchmark - log.welfare_expected);
    }

    if (rec.explore) {
      ++log.audit.explore_rounds;
      ++log.audit.explore_per_arm[rec.arm];
    }
    if (rec.corrupted) {
      ++log.audit.corrupted_rounds;
      if (rec.explore) ++log.audit.corrupted_explore_per_arm[rec.arm];
    }
    const bool must_be_free = rec.click == 0 || rec.explore;
    if (rec.payment < 0.0 || rec.payment > rec.bids[rec.arm] + 1e-12 ||
        (must_be_free && rec.payment != 0.0)) {
      ++log.audit.payment_violations;
    }

    if (config.record_estimates && mechanism->estimate_version() != last_version) {
      log.estimate_trace.push_back({t + 1, mechanism->estimates()});
    }
    last_version = mechanism->estimate_version();
    log.rounds.push_back(std::move(rec));
  }

  if (!config.keep_rounds) {
    log.rounds.clear();
    log.rounds.shrink_to_fit();
  }
  return log;
}

std::vector<RunLog> run_many(const RunConfig& config, std::size_t num_seeds, std::size_t threads) {
  std::vector<RunLog> logs(num_seeds);
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < num_seeds; i += stride) {
      RunConfig replica = config;
      replica.seed = derive_seed(config.seed, i);
      logs[i] = run(replica);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, num_seeds));
  if (threads == 1) {
    work(0, 1);
    return logs;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  for (auto& th : pool) th.join();
  return logs;
}

double RegretSummary::mean_final(RegretEstimator estimator) const {
  const auto& v = estimator == RegretEstimator::kRealized ? final_realized : final_expected;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) welford(v[i], i + 1, mean, m2);
  return mean;
}

double RegretSummary::std_final(RegretEstimator estimator) const {
  const auto& v = estimator == RegretEstimator::kRealized ? final_realized : final_expected;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) welford(v[i], i + 1, mean, m2);
  return v.size() > 1 ? std::sqrt(m2 / static_cast<double>(v.size() - 1)) : 0.0;
}

RegretSummary regret_summary(std::span<const RunLog> logs) {
  if (logs.empty()) throw std::invalid_argument("regret_summary needs at least one run");
  const std::size_t horizon = logs.front().horizon;
  for (const auto& log : logs) {
    if (log.horizon != horizon) throw std::invalid_argument("runs have mismatched horizons");
  }
  RegretSummary s;
  s.num_runs = logs.size();
  const bool curves = std::all_of(logs.begin(), logs.end(), [&](const RunLog& l) {
    return l.regret_realized.size() == horizon && l.regret_expected.size() == horizon;
  });
  if (curves) {
    std::vector<double> m2_r(horizon, 0.0), m2_e(horizon, 0.0);
    s.mean_realized.assign(horizon, 0.0);
    s.mean_expected.assign(horizon, 0.0);
    for (std::size_t i = 0; i < logs.size(); ++i) {
      for (std::size_t t = 0; t < horizon; ++t) {
        welford(logs[i].regret_realized[t], i + 1, s.mean_realized[t], m2_r[t]);
        welford(logs[i].regret_expected[t], i + 1, s.mean_expected[t], m2_e[t]);
      }
    }
    const double denom = logs.size() > 1 ? static_cast<double>(logs.size() - 1) : 1.0;
    s.std_realized.resize(horizon);
    s.std_expected.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      s.std_realized[t] = logs.size() > 1 ? std::sqrt(m2_r[t] / denom) : 0.0;
      s.std_expected[t] = logs.size() > 1 ? std::sqrt(m2_e[t] / denom) : 0.0;
    }
  }
  for (const auto& log : logs) {
    s.final_realized.push_back(log.final_regret(RegretEstimator::kRealized));
    s.final_expected.push_back(log.final_regret(RegretEstimator::kExpected));
  }
  return s;
}

CorruptionSlack corruption_slack(std::size_t horizon, std::size_t num_agents, double epsilon,
                                 double corruption) {
  const double lt = log_of(horizon);
  const double k = static_cast<double>(num_agents);
  return {corruption + std::max(corruption, 6.0 * lt / epsilon),
          corruption + std::max(corruption, 6.0 * k * lt / epsilon)};
}

double theoretical_bound_stochastic(std::size_t horizon, std::size_t num_agents, double epsilon,
                                    double corruption) {
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(num_agents);
  const double lt = log_of(horizon);
  const double slack = corruption_slack(horizon, num_agents, epsilon, corruption).proof;
  return t * epsilon + std::sqrt(8.0 * k * t * lt / epsilon) + 24.0 * k * lt / epsilon +
         2.0 * (k + 1.0) + 4.0 * slack * lt;
}

ContextualBound theoretical_bound_contextual(std::size_t horizon, std::size_t num_agents,
                                             std::size_t num_experts, double epsilon, double alpha,
                                             double corruption) {
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(num_agents);
  const double lt = log_of(horizon);
  const double ltmk = std::log(t * static_cast<double>(num_experts) * k);
  const double base = t * epsilon + k * k * std::sqrt(8.0 * t * ltmk / epsilon) + 3.0 * k +
                      8.0 * k * k * ltmk / (epsilon * alpha * alpha);
  const auto slack = corruption_slack(horizon, num_agents, epsilon, corruption);
  auto with = [&](double c) { return base + 16.0 * c / alpha + 4.0 * k * c * lt; };
  return {with(slack.statement), with(slack.proof)};
}

double truthful_from_round(std::size_t horizon, std::size_t num_agents, std::size_t num_experts,
                           double epsilon, double alpha) {
  const double k = static_cast<double>(num_agents);
  const double ltmk = std::log(static_cast<double>(horizon) * static_cast<double>(num_experts) * k);
  return 8.0 * k * k * ltmk / (epsilon * alpha * alpha);
}

double estimation_error_radius(std::size_t horizon, std::size_t num_agents,
                               std::size_t num_experts, double epsilon, std::uint64_t round) {
  const double k = static_cast<double>(num_agents);
  const double ltmk = std::log(static_cast<double>(horizon) * static_cast<double>(num_experts) * k);
  return k * std::sqrt(2.0 * ltmk / (static_cast<double>(round) * epsilon));
}

namespace {

template <typename Deviation, typename Radius>
ErrorAudit audit_trace(const RunLog& log, std::uint64_t first_round, Deviation deviation,
                       Radius radius) {
  if (log.estimate_trace.empty()) {
    throw std::invalid_argument("audit needs a run recorded with record_estimates");
  }
  ErrorAudit audit;
  audit.first_audited_round = first_round;
  audit.round_violates.assign(log.horizon, false);
  std::size_t snap = 0;
  for (std::uint64_t t = 0; t < log.horizon; ++t) {
    while (snap + 1 < log.estimate_trace.size() && log.estimate_trace[snap + 1].round <= t) ++snap;
    const std::uint64_t one_based = t + 1;
    if (one_based < first_round) continue;
    const double r = radius(one_based);
    const auto [checked, violating] = deviation(log.estimate_trace[snap].estimates, r);
    audit.checked_triples += checked;
    audit.violating_triples += violating;
    if (violating > 0) audit.round_violates[t] = true;
  }
  return audit;
}

}  // namespace

ErrorAudit error_bound_audit(const RunLog& log, const PiTable& exact, double epsilon) {
  const std::size_t K = exact.num_agents();
  const std::size_t m = exact.num_experts();
  const auto first = static_cast<std::uint64_t>(std::ceil(24.0 * log_of(log.horizon) / epsilon));
  return audit_trace(
      log, first,
      [&](const PiTable& est, double r) {
        std::uint64_t violating = 0;
        for (AgentId a = 0; a < K; ++a)
          for (ExpertId h = 0; h < m; ++h)
            if (std::abs(est(a, h) - exact(a, h)) > r) ++violating;
        return std::pair<std::uint64_t, std::uint64_t>{K * m, violating};
      },
      [&](std::uint64_t t) { return estimation_error_radius(log.horizon, K, m, epsilon, t); });
}

ErrorAudit good_event_audit(const RunLog& log, std::span<const double> true_ctr, double epsilon,
                            double corruption) {
  const std::size_t K = true_ctr.size();
  const double lt = log_of(log.horizon);
  const double slack = corruption_slack(log.horizon, K, epsilon, corruption).proof;
  const auto first =
      static_cast<std::uint64_t>(std::ceil(24.0 * static_cast<double>(K) * lt / epsilon));
  return audit_trace(
      log, first,
      [&](const PiTable& est, double w) {
        std::uint64_t violating = 0;
        for (AgentId a = 0; a < K; ++a)
          if (std::abs(est(a, a) - true_ctr[a]) > w) ++violating;
        return std::pair<std::uint64_t, std::uint64_t>{K, violating};
      },
      [&](std::uint64_t t) {
        const double td = static_cast<double>(t);
        return std::sqrt(2.0 * static_cast<double>(K) * lt / (td * epsilon)) + 2.0 * slack / td;
      });
}

bool explore_fraction_ok(const RunLog& log) {
  return static_cast<double>(log.audit.explore_rounds) >=
         static_cast<double>(log.horizon) * log.epsilon / 2.0;
}

bool corruption_concentration_ok(const RunLog& log, double corruption) {
  const double slack = corruption_slack(log.horizon, log.num_agents, log.epsilon, corruption).proof;
  const double limit = slack * log.epsilon / static_cast<double>(log.num_agents);
  return std::all_of(log.audit.corrupted_explore_per_arm.begin(),
                     log.audit.corrupted_explore_per_arm.end(),
                     [&](std::uint64_t c) { return static_cast<double>(c) <= limit; });
}

double scaling_fit(const std::map<std::size_t, double>& final_regrets) {
  if (final_regrets.size() < 3) throw std::invalid_argument("scaling fit needs three horizons");
  const double lo = static_cast<double>(final_regrets.begin()->first);
  const double hi = static_cast<double>(final_regrets.rbegin()->first);
  if (lo <= 0.0 || hi / lo < 10.0) {
    throw std::invalid_argument("scaling fit horizons must span at least one decade");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(final_regrets.size());
  for (const auto& [horizon, regret] : final_regrets) {
    if (!(regret > 0.0)) throw std::invalid_argument("scaling fit needs positive regrets");
    const double x = std::log(static_cast<double>(horizon));
    const double y = std::log(regret);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ppcb
