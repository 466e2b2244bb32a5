#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ppcb/model.hpp"

namespace ppcb {
namespace {

TEST(InducedClickProb, ExampleEntries) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  EXPECT_NEAR(induced_click_prob(inst, experts, 0, 0), 0.7 / 3, 1e-15);
  const PiTable pi = exact_pi_table(inst, experts);
  const double expected[3][3] = {{0.7, 0.6, 0.2}, {0.2, 0.4, 0.8}, {0.3, 0.5, 0.9}};
  for (AgentId a = 0; a < 3; ++a)
    for (ExpertId h = 0; h < 3; ++h) EXPECT_NEAR(pi(a, h), expected[a][h] / 3, 1e-15) << a << h;
}

TEST(InducedClickProb, NeverRecommendedIsZero) {
  auto inst = example_instance();
  ExpertClass experts;
  experts.table = Matrix<AgentId>(1, 3, 1);
  EXPECT_EQ(induced_click_prob(inst, experts, 0, 0), 0.0);
}

TEST(InducedClickProb, SingleContextCertainClick) {
  const auto inst = stochastic_instance({0.5, 0.5}, {1.0, 0.3}, 10);
  EXPECT_EQ(induced_click_prob(inst, constant_experts(2, 1), 0, 0), 1.0);
}

TEST(ExpectedWelfare, Cases) {
  const auto inst = example_instance();
  const auto experts = example_experts();
  EXPECT_EQ(expected_welfare(inst, experts, 0, std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_NEAR(expected_welfare(inst, experts, 0, std::vector<double>{1, 1, 1}), 0.4, 1e-15);
  const PiTable pi = exact_pi_table(inst, experts);
  EXPECT_DOUBLE_EQ(expected_welfare(inst, experts, 1, std::vector<double>{0, 1, 0}), pi(1, 1));
}

TEST(ReportedWelfare, AffineInOwnBid) {
  const PiTable pi = exact_pi_table(example_instance(), example_experts());
  for (double b : {0.0, 0.25, 0.5, 1.0}) {
    const std::vector<double> bids = {b, 0.1, 0.2};
    EXPECT_NEAR(reported_welfare(pi, 2, bids), 0.2 / 3 * b + 0.26 / 3, 1e-15);
  }
  EXPECT_EQ(reported_welfare(pi, 1, std::vector<double>{0, 0, 0}), 0.0);
  const auto inst = example_instance();
  EXPECT_DOUBLE_EQ(reported_welfare(pi, 0, inst.values),
                   expected_welfare(inst, example_experts(), 0, inst.values));
}

TEST(BestExpert, ExampleProfiles) {
  const PiTable pi = exact_pi_table(example_instance(), example_experts());
  EXPECT_EQ(best_expert(pi, std::vector<double>{0.1, 0.1, 0.2}), 2u);
  EXPECT_EQ(best_expert(pi, std::vector<double>{0.9, 0.1, 0.2}), 0u);
  EXPECT_EQ(best_expert(pi, std::vector<double>{0.45, 0.1, 0.2}), 1u);
}

TEST(BestExpert, IdenticalColumnsPickLowestIndex) {
  PiTable pi(2, 4, PiTable::Kind::kExact);
  for (ExpertId h = 0; h < 4; ++h) pi(0, h) = 0.3, pi(1, h) = 0.6;
  EXPECT_EQ(best_expert(pi, std::vector<double>{0.5, 0.5}), 0u);
}

TEST(StochasticCtr, ColumnMeans) {
  const auto inst = example_instance();
  EXPECT_NEAR(stochastic_ctr(inst, 0), 0.5, 1e-15);
  EXPECT_NEAR(stochastic_ctr(inst, 2), 1.7 / 3, 1e-15);
  const auto flat = stochastic_instance({1, 1}, {0.4, 0.4}, 5);
  EXPECT_EQ(stochastic_ctr(flat, 1), 0.4);
}

TEST(Preordered, Cases) {
  EXPECT_TRUE(is_preordered(constant_experts(4, 3), 4));
  // Threshold experts over ordered contexts: agent 0 below the threshold, 1 above.
  ExpertClass thresholds;
  thresholds.table = Matrix<AgentId>(4, 3);
  for (std::size_t h = 0; h < 4; ++h)
    for (std::size_t x = 0; x < 3; ++x) thresholds.table(h, x) = x < h ? 0 : 1;
  EXPECT_TRUE(is_preordered(thresholds, 2));
  EXPECT_FALSE(is_preordered(example_experts(), 3));
}

TEST(ValidateInstance, Violations) {
  EXPECT_TRUE(validate_instance(example_instance(), example_experts()).empty());

  auto bad_probs = example_instance();
  bad_probs.context_probs = {0.3, 0.3, 0.3};
  EXPECT_EQ(validate_instance(bad_probs, example_experts()).size(), 1u);

  auto experts = example_experts();
  experts.table(1, 2) = 3;
  EXPECT_EQ(validate_instance(example_instance(), experts).size(), 1u);
  EXPECT_THROW(require_valid(example_instance(), experts), std::invalid_argument);
}

// Properties over random instances.

class RandomModel : public ::testing::TestWithParam<int> {};

TEST_P(RandomModel, PiTableProperties) {
  std::mt19937_64 rng(1000 + GetParam());
  std::uniform_int_distribution<std::size_t> size(1, 6);
  const std::size_t K = 1 + size(rng), m = size(rng), n = size(rng);
  const auto r = oracle::random_instance(rng, K, m, n);
  const PiTable pi = exact_pi_table(r.instance, r.experts);
  const auto reference = oracle::pi_by_definition(r.instance, r.experts);

  for (ExpertId h = 0; h < m; ++h) {
    double column = 0.0, direct = 0.0;
    for (AgentId a = 0; a < K; ++a) {
      EXPECT_NEAR(pi(a, h), reference[a][h], 1e-15);
      double max_ctr = 0.0;
      for (std::size_t x = 0; x < n; ++x) max_ctr = std::max(max_ctr, r.instance.ctr(x, a));
      EXPECT_GE(pi(a, h), 0.0);
      EXPECT_LE(pi(a, h), max_ctr + 1e-15);
      column += pi(a, h);
    }
    for (std::size_t x = 0; x < n; ++x) {
      direct += r.instance.context_probs[x] * r.instance.ctr(x, r.experts.table(h, x));
    }
    EXPECT_NEAR(column, direct, 1e-12);
  }

  std::vector<double> bids(K);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& b : bids) b = unit(rng);
  // Dyadic steps keep the comparison exact.
  const AgentId a = K - 1;
  const double delta = 0.125;
  for (ExpertId h = 0; h < m; ++h) {
    auto shifted = bids;
    shifted[a] += delta;
    EXPECT_NEAR(reported_welfare(pi, h, shifted) - reported_welfare(pi, h, bids), delta * pi(a, h),
                1e-15);
  }

  PiTable scaled = pi;
  for (AgentId i = 0; i < K; ++i)
    for (ExpertId h = 0; h < m; ++h) scaled(i, h) *= 4.0;
  EXPECT_EQ(best_expert(scaled, bids), best_expert(pi, bids));
  EXPECT_TRUE(is_preordered(constant_experts(K, n), K));
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomModel, ::testing::Range(0, 50));

}  // namespace
}  // namespace ppcb
