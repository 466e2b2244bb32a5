#include "ppcb/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppcb {
namespace {

void check_bids(std::span<const double> bids, std::size_t num_agents) {
  if (bids.size() != num_agents) {
    throw std::invalid_argument("bid profile has " + std::to_string(bids.size()) +
                                " entries, expected " + std::to_string(num_agents));
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon outside [0,1]");
}

void consume_pending(std::optional<ArmDraft>& pending, const ArmDraft& draft) {
  if (!pending || !(*pending == draft)) {
    throw std::logic_error("observe() does not match the preceding step()");
  }
  pending.reset();
}

AgentId argmax_score(std::span<const double> weights, std::span<const double> bids) {
  AgentId best = 0;
  double best_score = weights[0] * bids[0];
  for (AgentId j = 1; j < weights.size(); ++j) {
    const double s = weights[j] * bids[j];
    if (s > best_score) {
      best = j;
      best_score = s;
    }
  }
  return best;
}

PiTable diagonal_table(const std::vector<double>& ctr) {
  PiTable pi(ctr.size(), ctr.size(), PiTable::Kind::kEstimated);
  for (std::size_t a = 0; a < ctr.size(); ++a) pi(a, a) = ctr[a];
  return pi;
}

// Explore arms are drawn from the round's own streams so the draw never
// depends on bids or history.
ArmDraft draw_explore(double epsilon, std::size_t num_agents, const RoundStreams& streams) {
  auto coin = streams.stream(Purpose::kExploreCoin);
  auto arm_stream = streams.stream(Purpose::kExploreArm);
  const bool explore = coin.uniform() < epsilon;
  const auto arm = static_cast<AgentId>(arm_stream.below(num_agents));
  return {arm, explore};
}

}  // namespace

std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kContextualGreedy: return "contextual-greedy";
    case MechanismKind::kStochasticGreedy: return "stochastic-greedy";
    case MechanismKind::kExploreThenCommit: return "explore-then-commit";
    case MechanismKind::kPerfectInfo: return "perfect-info";
  }
  return "unknown";
}

std::optional<MechanismKind> parse_mechanism_kind(std::string_view name) {
  for (auto kind : {MechanismKind::kContextualGreedy, MechanismKind::kStochasticGreedy,
                    MechanismKind::kExploreThenCommit, MechanismKind::kPerfectInfo}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

SecondPriceOutcome weighted_second_price(std::span<const double> weights,
                                         std::span<const double> bids) {
  if (weights.empty() || weights.size() != bids.size()) {
    throw std::invalid_argument("weights and bids must be non-empty and of equal length");
  }
  SecondPriceOutcome out;
  out.winner = argmax_score(weights, bids);
  double second = 0.0;
  for (AgentId j = 0; j < weights.size(); ++j) {
    if (j != out.winner) second = std::max(second, weights[j] * bids[j]);
  }
  const double w = weights[out.winner];
  out.price = w > 0.0 ? std::min(second / w, bids[out.winner]) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// ContextualGreedy

ContextualGreedy::ContextualGreedy(ExpertClass experts, std::size_t num_agents, double epsilon)
    : experts_(std::move(experts)),
      num_agents_(num_agents),
      epsilon_(epsilon),
      explore_counts_(num_agents, 0),
      hits_(num_agents, experts_.num_experts(), 0) {
  check_epsilon(epsilon);
  if (num_agents == 0 || experts_.num_experts() == 0) {
    throw std::invalid_argument("contextual mechanism needs agents and experts");
  }
}

double ContextualGreedy::raw_estimate(AgentId agent, ExpertId expert) const {
  if (explore_rounds_.empty()) return 0.0;
  return static_cast<double>(num_agents_) * static_cast<double>(hits_(agent, expert)) /
         static_cast<double>(explore_rounds_.size());
}

PiTable ContextualGreedy::estimates() const {
  if (pinned_) return *pinned_;
  PiTable pi(num_agents_, experts_.num_experts(), PiTable::Kind::kEstimated);
  for (AgentId a = 0; a < num_agents_; ++a) {
    for (ExpertId h = 0; h < experts_.num_experts(); ++h) {
      pi(a, h) = std::min(1.0, raw_estimate(a, h));
    }
  }
  return pi;
}

void ContextualGreedy::pin_estimates(PiTable table) {
  if (table.num_agents() != num_agents_ || table.num_experts() != experts_.num_experts()) {
    throw std::invalid_argument("pinned table has the wrong shape");
  }
  pinned_ = std::move(table);
  ++version_;
}

std::vector<double> ContextualGreedy::arm_distribution(
    std::span<const double> bids, std::span<const double> context_probs) const {
  check_bids(bids, num_agents_);
  std::vector<double> dist(num_agents_, epsilon_ / static_cast<double>(num_agents_));
  const ExpertId h = best_expert(estimates(), bids);
  for (ContextId x = 0; x < context_probs.size(); ++x) {
    dist[experts_.recommend(h, x)] += (1.0 - epsilon_) * context_probs[x];
  }
  return dist;
}

ArmDraft ContextualGreedy::step(std::span<const double> bids, ContextId context,
                                const RoundStreams& streams) {
  check_bids(bids, num_agents_);
  ArmDraft draft = draw_explore(epsilon_, num_agents_, streams);
  if (!draft.explore) {
    const ExpertId h = best_expert(estimates(), bids);
    draft.arm = experts_.recommend(h, context);
  }
  pending_ = draft;
  return draft;
}

double ContextualGreedy::observe(std::span<const double> bids, ContextId context,
                                 const ArmDraft& draft, int click) {
  consume_pending(pending_, draft);
  const std::uint64_t round = round_++;
  if (draft.explore) {
    explore_rounds_.push_back(round);
    ++explore_counts_[draft.arm];
    if (click) {
      for (ExpertId h = 0; h < experts_.num_experts(); ++h) {
        if (experts_.recommend(h, context) == draft.arm) ++hits_(draft.arm, h);
      }
    }
    ++version_;
    return 0.0;
  }
  if (!click) return 0.0;
  const Envelope env = build_envelope(estimates(), bids, draft.arm);
  return myerson_payment(env, bids[draft.arm]);
}

// ---------------------------------------------------------------------------
// StochasticGreedy

StochasticGreedy::StochasticGreedy(std::size_t num_agents, double epsilon)
    : epsilon_(epsilon), ctr_hat_(num_agents, 0.0), explore_counts_(num_agents, 0) {
  check_epsilon(epsilon);
  if (num_agents == 0) throw std::invalid_argument("stochastic mechanism needs agents");
}

PiTable StochasticGreedy::estimates() const { return diagonal_table(ctr_hat_); }

std::vector<double> StochasticGreedy::arm_distribution(std::span<const double> bids,
                                                       std::span<const double>) const {
  check_bids(bids, ctr_hat_.size());
  std::vector<double> dist(ctr_hat_.size(), epsilon_ / static_cast<double>(ctr_hat_.size()));
  dist[argmax_score(ctr_hat_, bids)] += 1.0 - epsilon_;
  return dist;
}

ArmDraft StochasticGreedy::step(std::span<const double> bids, ContextId,
                                const RoundStreams& streams) {
  check_bids(bids, ctr_hat_.size());
  ArmDraft draft = draw_explore(epsilon_, ctr_hat_.size(), streams);
  if (!draft.explore) draft.arm = argmax_score(ctr_hat_, bids);
  pending_ = draft;
  return draft;
}

double StochasticGreedy::observe(std::span<const double> bids, ContextId, const ArmDraft& draft,
                                 int click) {
  consume_pending(pending_, draft);
  ++round_;
  if (draft.explore) {
    const AgentId a = draft.arm;
    const auto previous = static_cast<double>(explore_counts_[a]);
    ++explore_counts_[a];
    ctr_hat_[a] = (static_cast<double>(click) + ctr_hat_[a] * previous) /
                  static_cast<double>(explore_counts_[a]);
    ++version_;
    return 0.0;
  }
  if (!click) return 0.0;
  return weighted_second_price(ctr_hat_, bids).price;
}

// ---------------------------------------------------------------------------
// ExploreThenCommit

ExploreThenCommit::ExploreThenCommit(std::size_t num_agents, std::uint64_t explore_length)
    : explore_length_(explore_length), ctr_hat_(num_agents, 0.0), explore_counts_(num_agents, 0) {
  if (num_agents == 0) throw std::invalid_argument("explore-then-commit needs agents");
}

PiTable ExploreThenCommit::estimates() const { return diagonal_table(ctr_hat_); }

std::vector<double> ExploreThenCommit::arm_distribution(std::span<const double> bids,
                                                        std::span<const double>) const {
  check_bids(bids, ctr_hat_.size());
  std::vector<double> dist(ctr_hat_.size(), 0.0);
  if (round_ < explore_length_) {
    dist[round_ % ctr_hat_.size()] = 1.0;
  } else {
    dist[argmax_score(ctr_hat_, bids)] = 1.0;
  }
  return dist;
}

ArmDraft ExploreThenCommit::step(std::span<const double> bids, ContextId, const RoundStreams&) {
  check_bids(bids, ctr_hat_.size());
  ArmDraft draft;
  if (round_ < explore_length_) {
    draft = {static_cast<AgentId>(round_ % ctr_hat_.size()), true};
  } else {
    draft = {argmax_score(ctr_hat_, bids), false};
  }
  pending_ = draft;
  return draft;
}

double ExploreThenCommit::observe(std::span<const double> bids, ContextId, const ArmDraft& draft,
                                  int click) {
  consume_pending(pending_, draft);
  ++round_;
  if (draft.explore) {
    const AgentId a = draft.arm;
    const auto previous = static_cast<double>(explore_counts_[a]);
    ++explore_counts_[a];
    ctr_hat_[a] = (static_cast<double>(click) + ctr_hat_[a] * previous) /
                  static_cast<double>(explore_counts_[a]);
    ++version_;
    return 0.0;
  }
  if (!click) return 0.0;
  return weighted_second_price(ctr_hat_, bids).price;
}

// ---------------------------------------------------------------------------
// PerfectInfoGreedy

PerfectInfoGreedy::PerfectInfoGreedy(ExpertClass experts, PiTable exact)
    : experts_(std::move(experts)), exact_(std::move(exact)) {
  if (exact_.num_experts() != experts_.num_experts()) {
    throw std::invalid_argument("exact table does not match expert class");
  }
}

std::vector<double> PerfectInfoGreedy::arm_distribution(
    std::span<const double> bids, std::span<const double> context_probs) const {
  check_bids(bids, exact_.num_agents());
  std::vector<double> dist(exact_.num_agents(), 0.0);
  const ExpertId h = best_expert(exact_, bids);
  for (ContextId x = 0; x < context_probs.size(); ++x) {
    dist[experts_.recommend(h, x)] += context_probs[x];
  }
  return dist;
}

ArmDraft PerfectInfoGreedy::step(std::span<const double> bids, ContextId context,
                                 const RoundStreams&) {
  check_bids(bids, exact_.num_agents());
  ArmDraft draft{experts_.recommend(best_expert(exact_, bids), context), false};
  pending_ = draft;
  return draft;
}

double PerfectInfoGreedy::observe(std::span<const double> bids, ContextId, const ArmDraft& draft,
                                  int click) {
  consume_pending(pending_, draft);
  ++round_;
  if (!click) return 0.0;
  return myerson_payment(build_envelope(exact_, bids, draft.arm), bids[draft.arm]);
}

// ---------------------------------------------------------------------------

double clamp_epsilon(double epsilon) {
  constexpr double kLo = 1e-9;
  constexpr double kHi = 1.0 - 1e-9;
  if (std::isnan(epsilon)) return kLo;
  return std::clamp(epsilon, kLo, kHi);
}

double epsilon_stochastic_proof(std::size_t horizon, std::size_t num_agents) {
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(num_agents);
  return clamp_epsilon(2.0 * std::cbrt(k * std::log(t)) / std::cbrt(t));
}

double epsilon_stochastic_statement(std::size_t horizon, std::size_t num_agents) {
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(num_agents);
  return clamp_epsilon(2.0 * std::cbrt(k) / std::cbrt(t * std::log(t)));
}

double epsilon_contextual(std::size_t horizon, std::size_t num_experts, std::size_t num_agents) {
  const double t = static_cast<double>(horizon);
  const double m = static_cast<double>(num_experts);
  const double k = static_cast<double>(num_agents);
  return clamp_epsilon(2.0 / std::cbrt(t) * std::cbrt(std::log(t * m * k)) * std::pow(k, 4.0 / 3.0));
}

ExpertClass mechanism_experts(MechanismKind kind, const AuctionInstance& instance,
                              const ExpertClass& experts) {
  switch (kind) {
    case MechanismKind::kStochasticGreedy:
    case MechanismKind::kExploreThenCommit:
      return constant_experts(instance.num_agents, instance.num_contexts);
    case MechanismKind::kContextualGreedy:
    case MechanismKind::kPerfectInfo:
      return experts;
  }
  return experts;
}

std::unique_ptr<Mechanism> make_mechanism(const MechanismOptions& options,
                                          const AuctionInstance& instance,
                                          const ExpertClass& experts) {
  switch (options.kind) {
    case MechanismKind::kContextualGreedy:
      return std::make_unique<ContextualGreedy>(experts, instance.num_agents, options.epsilon);
    case MechanismKind::kStochasticGreedy:
      return std::make_unique<StochasticGreedy>(instance.num_agents, options.epsilon);
    case MechanismKind::kExploreThenCommit:
      return std::make_unique<ExploreThenCommit>(instance.num_agents, options.etc_explore_length);
    case MechanismKind::kPerfectInfo:
      return std::make_unique<PerfectInfoGreedy>(experts, exact_pi_table(instance, experts));
  }
  throw std::invalid_argument("unknown mechanism kind");
}

}  // namespace ppcb
