#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ppcb/mechanisms.hpp"

namespace ppcb {
namespace {

const std::vector<double> kExampleBids = {0.7, 0.1, 0.2};

TEST(ContextualGreedy, EpsilonOneExploresUniformly) {
  ContextualGreedy mech(example_experts(), 3, 1.0);
  std::vector<int> counts(3, 0);
  const int rounds = 30000;
  for (int t = 0; t < rounds; ++t) {
    const ArmDraft d = mech.step(kExampleBids, 0, RoundStreams(7, t));
    ASSERT_TRUE(d.explore);
    ++counts[d.arm];
    mech.observe(kExampleBids, 0, d, 0);
  }
  // Three binomial standard deviations around rounds / 3.
  const double sd = std::sqrt(rounds * (1.0 / 3) * (2.0 / 3));
  for (int c : counts) EXPECT_NEAR(c, rounds / 3.0, 3 * sd);
}

TEST(ContextualGreedy, ZeroEpsilonWithExactEstimatesFollowsBestExpert) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  ContextualGreedy mech(experts, 3, 0.0);
  mech.pin_estimates(exact_pi_table(inst, experts));
  const std::vector<double> bids = {0.9, 0.1, 0.2};
  for (ContextId x = 0; x < 3; ++x) {
    const ArmDraft d = mech.step(bids, x, RoundStreams(1, x));
    EXPECT_FALSE(d.explore);
    EXPECT_EQ(d.arm, experts.recommend(0, x));
    mech.observe(bids, x, d, 0);
  }
  const ArmDraft d = mech.step(bids, 0, RoundStreams(1, 9));
  EXPECT_EQ(d.arm, 0u);
}

TEST(ContextualGreedy, FirstExploreClickGivesRawEstimateK) {
  const auto experts = example_experts();
  ContextualGreedy mech(experts, 3, 1.0);
  const ArmDraft d = mech.step(kExampleBids, 1, RoundStreams(3, 0));
  ASSERT_TRUE(d.explore);
  EXPECT_EQ(mech.observe(kExampleBids, 1, d, 1), 0.0);
  for (ExpertId h = 0; h < 3; ++h) {
    const bool hit = experts.recommend(h, 1) == d.arm;
    EXPECT_EQ(mech.raw_estimate(d.arm, h), hit ? 3.0 : 0.0);
    EXPECT_EQ(mech.estimates()(d.arm, h), hit ? 1.0 : 0.0);
  }
  EXPECT_EQ(mech.explore_rounds(), std::vector<std::uint64_t>{0});
}

TEST(ContextualGreedy, UntrainedEstimatesUseExpertZero) {
  ContextualGreedy mech(example_experts(), 3, 0.0);
  const PiTable pi = mech.estimates();
  for (AgentId a = 0; a < 3; ++a)
    for (ExpertId h = 0; h < 3; ++h) EXPECT_EQ(pi(a, h), 0.0);
  const ArmDraft d = mech.step(kExampleBids, 2, RoundStreams(0, 0));
  EXPECT_EQ(d.arm, example_experts().recommend(0, 2));
}

TEST(ContextualGreedy, ExploitPaymentAndNoLearning) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  ContextualGreedy mech(experts, 3, 0.0);
  mech.pin_estimates(exact_pi_table(inst, experts));
  const auto version = mech.estimate_version();
  ArmDraft d = mech.step(kExampleBids, 0, RoundStreams(0, 0));
  ASSERT_EQ(d.arm, 0u);
  EXPECT_NEAR(mech.observe(kExampleBids, 0, d, 1), 0.257143, 1e-6);
  d = mech.step(kExampleBids, 0, RoundStreams(0, 1));
  EXPECT_EQ(mech.observe(kExampleBids, 0, d, 0), 0.0);
  EXPECT_EQ(mech.estimate_version(), version);
  EXPECT_TRUE(mech.explore_rounds().empty());
}

TEST(ContextualGreedy, ObserveMustMatchStep) {
  ContextualGreedy mech(example_experts(), 3, 0.5);
  EXPECT_THROW(mech.observe(kExampleBids, 0, ArmDraft{0, true}, 1), std::logic_error);
  const ArmDraft d = mech.step(kExampleBids, 0, RoundStreams(0, 0));
  ArmDraft other = d;
  other.explore = !other.explore;
  EXPECT_THROW(mech.observe(kExampleBids, 0, other, 1), std::logic_error);
  EXPECT_THROW(mech.step(std::vector<double>{0.1}, 0, RoundStreams(0, 0)), std::invalid_argument);
  EXPECT_THROW(ContextualGreedy(example_experts(), 3, 1.5), std::invalid_argument);
}

TEST(ContextualGreedy, ArmDistributionMixesUniformAndBestExpert) {
  ContextualGreedy mech(example_experts(), 3, 0.3);
  mech.pin_estimates(exact_pi_table(example_instance(), example_experts()));
  const std::vector<double> probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto dist = mech.arm_distribution(std::vector<double>{0.9, 0.1, 0.2}, probs);
  // Expert 0 recommends each arm on exactly one context.
  for (double p : dist) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  double total = 0.0;
  for (double p : mech.arm_distribution(std::vector<double>{0.1, 0.1, 0.2}, probs)) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(WeightedSecondPrice, Examples) {
  auto out = weighted_second_price(std::vector<double>{0.5, 0.4}, std::vector<double>{0.6, 0.5});
  EXPECT_EQ(out.winner, 0u);
  EXPECT_NEAR(out.price, 0.4, 1e-15);
  out = weighted_second_price(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{0.2, 0.7, 0.4});
  EXPECT_EQ(out.winner, 1u);
  out = weighted_second_price(std::vector<double>{0.5, 0.0}, std::vector<double>{0.6, 0.9});
  EXPECT_EQ(out.winner, 0u);
  EXPECT_EQ(out.price, 0.0);
  out = weighted_second_price(std::vector<double>{0.0, 0.0}, std::vector<double>{0.6, 0.9});
  EXPECT_EQ(out.price, 0.0);
  EXPECT_THROW(weighted_second_price(std::vector<double>{0.5}, std::vector<double>{0.6, 0.9}),
               std::invalid_argument);
}

TEST(WeightedSecondPrice, TruthfulForRandomWeights) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 2 + trial % 4;
    std::vector<double> weights(K), bids(K);
    for (std::size_t j = 0; j < K; ++j) weights[j] = 0.01 + unit(rng), bids[j] = unit(rng);
    const double value = unit(rng);
    auto utility = [&](double b) {
      auto profile = bids;
      profile[0] = b;
      const auto o = weighted_second_price(weights, profile);
      return o.winner == 0 ? weights[0] * (value - o.price) : 0.0;
    };
    const double truthful = utility(value);
    EXPECT_NEAR(truthful, oracle::second_price_utility(weights, bids, value, value), 1e-15);
    for (int k = 0; k <= 1000; ++k) EXPECT_LE(utility(k / 1000.0), truthful);
  }
}

TEST(StochasticGreedy, LearnsRunningMeanAndCharges) {
  StochasticGreedy mech(2, 1.0);
  // Feed explore rounds until each arm has a known history.
  std::vector<std::vector<int>> clicks = {{}, {}};
  for (int t = 0; t < 40; ++t) {
    const std::vector<double> bids = {0.6, 0.5};
    const ArmDraft d = mech.step(bids, 0, RoundStreams(5, t));
    const int click = (t % 3 == 0) ? 1 : 0;
    clicks[d.arm].push_back(click);
    EXPECT_EQ(mech.observe(bids, 0, d, click), 0.0);
  }
  for (AgentId a = 0; a < 2; ++a) {
    double mean = 0.0;
    for (int c : clicks[a]) mean += c;
    mean /= static_cast<double>(clicks[a].size());
    EXPECT_NEAR(mech.ctr_estimates()[a], mean, 1e-12);
    EXPECT_EQ(mech.explore_counts()[a], clicks[a].size());
  }
  const PiTable pi = mech.estimates();
  EXPECT_EQ(pi(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(pi(1, 1), mech.ctr_estimates()[1]);
}

TEST(StochasticGreedy, ExploitWinnerAndPrice) {
  // Epsilon zero never explores, so estimates stay zero and every score ties.
  StochasticGreedy mech(2, 0.0);
  const std::vector<double> bids = {0.6, 0.5};
  const ArmDraft d = mech.step(bids, 0, RoundStreams(0, 0));
  EXPECT_FALSE(d.explore);
  EXPECT_EQ(d.arm, 0u);
  EXPECT_EQ(mech.observe(bids, 0, d, 1), 0.0);  // winner estimate 0
}

TEST(ExploreThenCommit, RoundRobinThenCommit) {
  ExploreThenCommit mech(3, 9);
  const std::vector<double> bids = {0.2, 0.9, 0.5};
  for (std::uint64_t t = 0; t < 9; ++t) {
    const ArmDraft d = mech.step(bids, 0, RoundStreams(0, t));
    EXPECT_TRUE(d.explore);
    EXPECT_EQ(d.arm, t % 3);
    mech.observe(bids, 0, d, d.arm == 2 ? 1 : 0);
  }
  for (std::uint64_t t = 9; t < 20; ++t) {
    const ArmDraft d = mech.step(bids, 0, RoundStreams(0, t));
    EXPECT_FALSE(d.explore);
    EXPECT_EQ(d.arm, 2u);
    mech.observe(bids, 0, d, 0);
  }
}

TEST(ExploreThenCommit, ZeroLengthCommitsToArmZero) {
  ExploreThenCommit mech(3, 0);
  const std::vector<double> bids = {0.2, 0.9, 0.5};
  const ArmDraft d = mech.step(bids, 0, RoundStreams(0, 0));
  EXPECT_FALSE(d.explore);
  EXPECT_EQ(d.arm, 0u);
}

TEST(PerfectInfo, FollowsExactBestExpert) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  PerfectInfoGreedy mech(experts, exact_pi_table(inst, experts));
  const ArmDraft d = mech.step(kExampleBids, 2, RoundStreams(0, 0));
  EXPECT_EQ(d.arm, experts.recommend(0, 2));
  EXPECT_FALSE(d.explore);
}

TEST(EpsilonPresets, Formulas) {
  const double T = 1e5, K = 2;
  EXPECT_NEAR(epsilon_stochastic_proof(100000, 2), 2 * std::cbrt(K * std::log(T)) / std::cbrt(T), 1e-12);
  EXPECT_NEAR(epsilon_stochastic_statement(100000, 2), 2 * std::cbrt(K) / std::cbrt(T * std::log(T)),
              1e-12);
  EXPECT_NEAR(epsilon_contextual(10000, 3, 3),
              std::min(1 - 1e-9, 2 * std::cbrt(std::log(9e4)) * std::pow(3.0, 4.0 / 3) / std::cbrt(1e4)),
              1e-12);
  EXPECT_LT(epsilon_contextual(100, 5, 5), 1.0);
  EXPECT_GT(clamp_epsilon(0.0), 0.0);
}

TEST(MakeMechanism, KindsAndNames) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  for (auto kind : {MechanismKind::kContextualGreedy, MechanismKind::kStochasticGreedy,
                    MechanismKind::kExploreThenCommit, MechanismKind::kPerfectInfo}) {
    const auto mech = make_mechanism({kind, 0.2, 30}, inst, experts);
    EXPECT_EQ(mech->kind(), kind);
    EXPECT_EQ(parse_mechanism_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_mechanism_kind("greedy").has_value());
  EXPECT_EQ(mechanism_experts(MechanismKind::kStochasticGreedy, inst, experts).table,
            constant_experts(3, 3).table);
}

}  // namespace
}  // namespace ppcb
