#include <gtest/gtest.h>

#include "ppcb/adversary.hpp"
#include "ppcb/simulator.hpp"

namespace ppcb {
namespace {

const std::vector<double> kUniform = {0.5, 0.5};

TEST(Adversary, NoneNeverCorrupts) {
  Adversary adv({AdversaryKind::kNone, 100, 0, 0.0}, 2, 0);
  for (int t = 0; t < 10; ++t) {
    const CorruptionPlan plan = adv.plan({}, kUniform, RoundStreams(0, t));
    EXPECT_FALSE(plan.corrupt_this_round);
    EXPECT_TRUE(plan.overridden_clicks.empty());
  }
}

TEST(Adversary, ZeroBudgetNeverCorrupts) {
  for (auto kind : {AdversaryKind::kSuppressBestFirstC, AdversaryKind::kBoostOwn,
                    AdversaryKind::kSuppressRival, AdversaryKind::kRandomFlip}) {
    Adversary adv({kind, 0, 1, 1.0}, 2, 0);
    EXPECT_FALSE(adv.plan({}, kUniform, RoundStreams(0, 0)).corrupt_this_round);
  }
}

TEST(Adversary, SuppressBestSpendsBudgetFirst) {
  Adversary adv({AdversaryKind::kSuppressBestFirstC, 3, 0, 0.0}, 2, 1);
  for (int t = 0; t < 5; ++t) {
    const CorruptionPlan plan = adv.plan({}, kUniform, RoundStreams(0, t));
    EXPECT_EQ(plan.corrupt_this_round, t < 3);
    if (plan.corrupt_this_round) {
      ASSERT_EQ(plan.overridden_clicks.size(), 2u);
      EXPECT_FALSE(plan.overridden_clicks[0].has_value());
      EXPECT_EQ(plan.overridden_clicks[1], 0);
    }
  }
  EXPECT_EQ(adv.budget_remaining(), 0u);
  EXPECT_EQ(adv.corrupted_rounds(), 3u);
}

TEST(Adversary, TargetedKindsWaitForTheTarget) {
  Adversary boost({AdversaryKind::kBoostOwn, 5, 1, 0.0}, 2, 0);
  EXPECT_FALSE(boost.plan({}, std::vector<double>{1.0, 0.0}, RoundStreams(0, 0)).corrupt_this_round);
  const CorruptionPlan plan = boost.plan({}, kUniform, RoundStreams(0, 1));
  ASSERT_TRUE(plan.corrupt_this_round);
  EXPECT_EQ(plan.overridden_clicks[1], 1);

  Adversary rival({AdversaryKind::kSuppressRival, 5, 0, 0.0}, 2, 0);
  EXPECT_EQ(rival.plan({}, kUniform, RoundStreams(0, 0)).overridden_clicks[0], 0);
}

TEST(Adversary, RandomFlipRespectsProbabilityAndBudget) {
  Adversary never({AdversaryKind::kRandomFlip, 50, 0, 0.0}, 2, 0);
  Adversary always({AdversaryKind::kRandomFlip, 50, 0, 1.0}, 2, 0);
  for (int t = 0; t < 60; ++t) {
    EXPECT_FALSE(never.plan({}, kUniform, RoundStreams(1, t)).corrupt_this_round);
    EXPECT_EQ(always.plan({}, kUniform, RoundStreams(1, t)).corrupt_this_round, t < 50);
  }
}

TEST(Adversary, RandomFlipInvertsHistoricalMajority) {
  std::vector<RoundRecord> history(4);
  for (std::size_t t = 0; t < 4; ++t) {
    history[t].round = t;
    history[t].arm = t % 2;
    history[t].click = t % 2 == 0 ? 1 : 0;  // arm 0 always clicked, arm 1 never
  }
  Adversary adv({AdversaryKind::kRandomFlip, 10, 0, 1.0}, 2, 0);
  const CorruptionPlan plan = adv.plan(history, kUniform, RoundStreams(0, 4));
  ASSERT_TRUE(plan.corrupt_this_round);
  EXPECT_EQ(plan.overridden_clicks[0], 0);
  EXPECT_EQ(plan.overridden_clicks[1], 1);
}

TEST(Adversary, ApplyOverrides) {
  EXPECT_EQ(apply({}, 0, 1).click, 1);
  EXPECT_FALSE(apply({}, 0, 1).corrupted);
  const CorruptionPlan zero{true, {0, std::nullopt}};
  EXPECT_EQ(apply(zero, 0, 1).click, 0);
  EXPECT_TRUE(apply(zero, 0, 1).corrupted);
  EXPECT_EQ(apply(zero, 1, 1).click, 1);
  const CorruptionPlan one{true, {1, 1}};
  const AppliedClick c = apply(one, 1, 0);
  EXPECT_EQ(c.click, 1);
  EXPECT_TRUE(c.corrupted);
}

TEST(Adversary, OptionValidation) {
  EXPECT_THROW(Adversary({AdversaryKind::kBoostOwn, 1, 5, 0.0}, 2, 0), std::out_of_range);
  EXPECT_THROW(Adversary({AdversaryKind::kNone, 1, 0, 0.0}, 2, 2), std::out_of_range);
  EXPECT_THROW(Adversary({AdversaryKind::kRandomFlip, 1, 0, 1.5}, 2, 0), std::invalid_argument);
  EXPECT_EQ(parse_adversary_kind("suppress-best-first-c"), AdversaryKind::kSuppressBestFirstC);
  EXPECT_FALSE(parse_adversary_kind("suppress").has_value());
}

}  // namespace
}  // namespace ppcb
