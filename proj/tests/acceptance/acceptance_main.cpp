// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 1-6 and 10 come from the experiment drivers shared with
// the CLI; 7-9 are checked here against the brute-force oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

#include "oracles.hpp"
#include "ppcb/envelope.hpp"
#include "ppcb/experiments.hpp"

namespace {

using namespace ppcb;

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

CriterionResult exploration_separation() {
  CriterionResult r{7, "exploration separation", true, "", {}};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t pairs = 50, T = 2000;
  std::size_t mismatches = 0, explore_rounds = 0;
  const MechanismKind kinds[] = {MechanismKind::kContextualGreedy, MechanismKind::kStochasticGreedy};
  for (std::size_t i = 0; i < pairs; ++i) {
    std::vector<double> bids = {unit(rng), unit(rng), unit(rng)};
    std::vector<double> permuted = bids;
    while (permuted == bids) std::shuffle(permuted.begin(), permuted.end(), rng);
    for (MechanismKind kind : kinds) {
      RunConfig a = basic_config(example_instance(), example_experts(), {kind, 0.2, 0}, T, 1000 + i);
      RunConfig b = a;
      for (std::size_t k = 0; k < 3; ++k) {
        a.policies[k] = AgentPolicy::fixed(bids[k]);
        b.policies[k] = AgentPolicy::fixed(permuted[k]);
      }
      const RunLog la = run(a), lb = run(b);
      std::vector<std::pair<std::uint64_t, AgentId>> sa, sb;
      for (const auto& rec : la.rounds)
        if (rec.explore) sa.emplace_back(rec.round, rec.arm);
      for (const auto& rec : lb.rounds)
        if (rec.explore) sb.emplace_back(rec.round, rec.arm);
      explore_rounds += sa.size();
      if (sa != sb || sa.empty()) ++mismatches;
    }
  }
  r.passed = mismatches == 0;
  r.detail = std::to_string(pairs) + " pairs x 2 mechanisms, " + std::to_string(explore_rounds) +
             " explore rounds per side, " + std::to_string(mismatches) + " mismatched pairs";
  r.metrics = {{"mismatched_pairs", static_cast<double>(mismatches)}};
  return r;
}

double second_price_utility(const std::vector<double>& weights, const std::vector<double>& bids,
                            double value) {
  const SecondPriceOutcome o = weighted_second_price(weights, bids);
  if (o.winner != 0) return 0.0;
  return weights[0] * (value - o.price);
}

CriterionResult second_price_exactness() {
  CriterionResult r{8, "weighted second-price exactness", true, "", {}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 5);
  std::size_t failures = 0, oracle_mismatches = 0;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    const std::size_t K = size(rng);
    std::vector<double> weights(K), bids(K);
    for (std::size_t j = 0; j < K; ++j) {
      weights[j] = unit(rng);
      bids[j] = unit(rng);
    }
    const double value = unit(rng);
    bids[0] = value;
    const double truthful = second_price_utility(weights, bids, value);
    if (std::abs(truthful - oracle::second_price_utility(weights, bids, value, value)) > 1e-12)
      ++oracle_mismatches;
    double grid_max = -1.0;
    for (int k = 0; k <= 1000; ++k) {
      bids[0] = k / 1000.0;
      grid_max = std::max(grid_max, second_price_utility(weights, bids, value));
    }
    if (truthful < grid_max) ++failures;
  }
  r.passed = failures == 0 && oracle_mismatches == 0;
  r.detail = "1000 triples, " + std::to_string(failures) + " where a grid bid beat the value, " +
             std::to_string(oracle_mismatches) + " oracle mismatches";
  r.metrics = {{"failures", static_cast<double>(failures)},
               {"oracle_mismatches", static_cast<double>(oracle_mismatches)}};
  return r;
}

CriterionResult oracle_equivalence() {
  CriterionResult r{9, "envelope oracle equivalence", true, "", {}};
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t g_mismatches = 0, checks = 0;
  double worst_integral = 0.0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t K = std::max<std::size_t>(2, size(rng));
    const auto fixture = oracle::random_instance(rng, K, size(rng), size(rng));
    const PiTable pi = exact_pi_table(fixture.instance, fixture.experts);
    const auto raw = oracle::pi_by_definition(fixture.instance, fixture.experts);
    std::vector<double> bids(K);
    for (double& b : bids) b = unit(rng);
    for (AgentId a = 0; a < K; ++a) {
      const Envelope env = build_envelope(pi, bids, a);
      const auto scan = [&](double b) { return oracle::scan_click_prob(raw, bids, a, b); };
      for (int k = 0; k <= 1000; ++k) {
        const double b = k / 1000.0;
        ++checks;
        if (env.g(b) != scan(b)) ++g_mismatches;
      }
      const auto cumulative = oracle::scan_integral(scan, 1000);
      for (int k = 0; k <= 1000; ++k) {
        worst_integral = std::max(worst_integral, std::abs(env.integral(k / 1000.0) - cumulative[k]));
      }
    }
  }
  r.passed = g_mismatches == 0 && worst_integral <= 1e-9;
  std::ostringstream d;
  d << checks << " grid points, " << g_mismatches << " g mismatches, max integral error "
    << worst_integral << " (tolerance 1e-9)";
  r.detail = d.str();
  r.metrics = {{"g_mismatches", static_cast<double>(g_mismatches)},
               {"max_integral_error", worst_integral}};
  return r;
}

}  // namespace

int main() {
  const std::size_t threads = worker_threads();
  bool all = true;
  const auto report = [&](const CriterionResult& r, double seconds) {
    all = all && r.passed;
    std::printf("%s (%.1fs)\n", format_result(r).c_str(), seconds);
    std::fflush(stdout);
  };
  const auto timed = [&](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto value = fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::make_pair(std::move(value), s);
  };

  {
    ScalingParams p;
    p.threads = threads;
    auto [o, s] = timed([&] { return evaluate_regret_scaling(p); });
    report(o.result, s);
  }
  {
    CorruptionParams p;
    p.threads = threads;
    auto [o, s] = timed([&] { return evaluate_corruption_robustness(p); });
    report(o.result, s);
  }
  {
    auto [o, s] = timed([] { return evaluate_myerson_truthfulness({}); });
    report(o, s);
  }
  {
    auto [o, s] = timed([] { return evaluate_perturbed_counterexample(); });
    report(o.result, s);
  }
  {
    ErrorBoundParams p;
    p.threads = threads;
    auto [o, s] = timed([&] { return evaluate_error_bound(p); });
    report(o.result, s);
  }
  RationalOutcome rational;
  {
    RationalParams p;
    p.threads = threads;
    auto [o, s] = timed([&] { return evaluate_alpha_rational(p); });
    report(o.result, s);
    rational = std::move(o);
  }
  {
    auto [o, s] = timed(exploration_separation);
    report(o, s);
  }
  {
    auto [o, s] = timed(second_price_exactness);
    report(o, s);
  }
  {
    auto [o, s] = timed(oracle_equivalence);
    report(o, s);
  }
  report(rational.ceiling, 0.0);

  std::printf("%s\n", all ? "all criteria passed" : "some criteria FAILED");
  return all ? 0 : 1;
}
