#pragma once

// Click corruption under a budget of C rounds. The adversary commits to a
// plan before the round's arm is drawn, seeing only past rounds and the
// principal's marginal over arms.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ppcb/model.hpp"
#include "ppcb/rng.hpp"

namespace ppcb {

struct RoundRecord;

struct CorruptionPlan {
  bool corrupt_this_round = false;
  /// Per-arm override; arms without one keep their stochastic click.
  /// Empty when corrupt_this_round is false.
  std::vector<std::optional<int>> overridden_clicks;
};

enum class AdversaryKind { kNone, kSuppressBestFirstC, kBoostOwn, kSuppressRival, kRandomFlip };

std::string_view to_string(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary_kind(std::string_view name);

struct AdversaryOptions {
  AdversaryKind kind = AdversaryKind::kNone;
  std::uint64_t budget = 0;  // C
  AgentId target = 0;        // boosted or suppressed agent
  double flip_prob = 0.0;    // per-round corruption probability for random flips
};

class Adversary {
 public:
  /// `best_arm` is the welfare-optimal arm, used by suppress-best.
  Adversary(AdversaryOptions options, std::size_t num_agents, AgentId best_arm);

  /// `arm_distribution` is the principal's marginal for this round; the
  /// realized explore coin and arm are never visible here.
  CorruptionPlan plan(std::span<const RoundRecord> history, std::span<const double> arm_distribution,
                      const RoundStreams& streams);

  std::uint64_t budget_remaining() const { return remaining_; }
  std::uint64_t corrupted_rounds() const { return options_.budget - remaining_; }
  const AdversaryOptions& options() const { return options_; }

 private:
  CorruptionPlan spend(std::vector<std::optional<int>> overrides);

  AdversaryOptions options_;
  std::size_t num_agents_;
  AgentId best_arm_;
  std::uint64_t remaining_;
  std::size_t seen_ = 0;
  std::vector<std::uint64_t> shown_;
  std::vector<std::uint64_t> clicked_;
};

struct AppliedClick {
  int click = 0;
  bool corrupted = false;
};

AppliedClick apply(const CorruptionPlan& plan, AgentId drawn_arm, int stochastic_click);

}  // namespace ppcb
