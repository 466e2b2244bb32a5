#include "ppcb/adversary.hpp"

#include <stdexcept>

#include "ppcb/simulator.hpp"

namespace ppcb {

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kSuppressBestFirstC: return "suppress-best-first-c";
    case AdversaryKind::kBoostOwn: return "boost-own";
    case AdversaryKind::kSuppressRival: return "suppress-rival";
    case AdversaryKind::kRandomFlip: return "random-flip";
  }
  return "unknown";
}

std::optional<AdversaryKind> parse_adversary_kind(std::string_view name) {
  for (auto kind : {AdversaryKind::kNone, AdversaryKind::kSuppressBestFirstC,
                    AdversaryKind::kBoostOwn, AdversaryKind::kSuppressRival,
                    AdversaryKind::kRandomFlip}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

Adversary::Adversary(AdversaryOptions options, std::size_t num_agents, AgentId best_arm)
    : options_(options), num_agents_(num_agents), best_arm_(best_arm), remaining_(options.budget),
      shown_(num_agents, 0),
      clicked_(num_agents, 0) {
  if (best_arm >= num_agents) throw std::out_of_range("best arm out of range");
  const bool targeted =
      options.kind == AdversaryKind::kBoostOwn || options.kind == AdversaryKind::kSuppressRival;
  if (targeted && options.target >= num_agents) {
    throw std::out_of_range("adversary target out of range");
  }
  if (!(options.flip_prob >= 0.0 && options.flip_prob <= 1.0)) {
    throw std::invalid_argument("flip probability outside [0,1]");
  }
}

CorruptionPlan Adversary::spend(std::vector<std::optional<int>> overrides) {
  --remaining_;
  return {true, std::move(overrides)};
}

CorruptionPlan Adversary::plan(std::span<const RoundRecord> history,
                               std::span<const double> arm_distribution,
                               const RoundStreams& streams) {
  if (remaining_ == 0 || options_.kind == AdversaryKind::kNone) return {};
  std::vector<std::optional<int>> overrides(num_agents_);

  switch (options_.kind) {
    case AdversaryKind::kNone:
      return {};
    case AdversaryKind::kSuppressBestFirstC:
      overrides[best_arm_] = 0;
      return spend(std::move(overrides));
    case AdversaryKind::kBoostOwn:
    case AdversaryKind::kSuppressRival: {
      // Budget is only worth spending when the target can be drawn.
      if (arm_distribution[options_.target] <= 0.0) return {};
      overrides[options_.target] = options_.kind == AdversaryKind::kBoostOwn ? 1 : 0;
      return spend(std::move(overrides));
    }
    case AdversaryKind::kRandomFlip: {
      auto coin = streams.stream(Purpose::kAdversary);
      if (!coin.bernoulli(options_.flip_prob)) return {};
      // Report the opposite of each arm's typical outcome so far.
      for (; seen_ < history.size(); ++seen_) {
        ++shown_[history[seen_].arm];
        clicked_[history[seen_].arm] += static_cast<std::uint64_t>(history[seen_].click);
      }
      for (AgentId a = 0; a < num_agents_; ++a) {
        overrides[a] = shown_[a] > 0 && 2 * clicked_[a] >= shown_[a] ? 0 : 1;
      }
      return spend(std::move(overrides));
    }
  }
  return {};
}

AppliedClick apply(const CorruptionPlan& plan, AgentId drawn_arm, int stochastic_click) {
  if (!plan.corrupt_this_round) return {stochastic_click, false};
  const auto& override_click = plan.overridden_clicks.at(drawn_arm);
  return {override_click ? *override_click : stochastic_click, true};
}

}  // namespace ppcb
