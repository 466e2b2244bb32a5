#pragma once

// Allocation and payment engines. Every mechanism runs in two phases per
// round: step() picks an arm from the bids (and, for contextual mechanisms,
// the context the experts see), observe() receives the click and returns the
// per-click payment while updating any estimates.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppcb/envelope.hpp"
#include "ppcb/model.hpp"
#include "ppcb/rng.hpp"

namespace ppcb {

enum class MechanismKind { kContextualGreedy, kStochasticGreedy, kExploreThenCommit, kPerfectInfo };

std::string_view to_string(MechanismKind kind);
std::optional<MechanismKind> parse_mechanism_kind(std::string_view name);

struct ArmDraft {
  AgentId arm = 0;
  bool explore = false;

  bool operator==(const ArmDraft&) const = default;
};

class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual MechanismKind kind() const = 0;
  virtual std::size_t num_agents() const = 0;

  /// The principal's marginal over arms for the coming round, before any
  /// randomness of the round is realized.
  virtual std::vector<double> arm_distribution(std::span<const double> bids,
                                               std::span<const double> context_probs) const = 0;

  virtual ArmDraft step(std::span<const double> bids, ContextId context,
                        const RoundStreams& streams) = 0;

  /// Must follow the matching step(). Returns the payment charged to the
  /// drawn arm; zero unless it was an exploit round with a click.
  virtual double observe(std::span<const double> bids, ContextId context, const ArmDraft& draft,
                         int click) = 0;

  /// Click probabilities the exploit allocation and payments are computed
  /// from, over the mechanism's own expert class.
  virtual PiTable estimates() const = 0;

  /// Changes whenever estimates() may have changed.
  virtual std::uint64_t estimate_version() const = 0;

  virtual std::uint64_t rounds_played() const = 0;
};

/// Winner of argmax_j weight_j * bid_j (lowest index on ties) and the per
/// click price: the second highest score divided by the winner's weight,
/// capped at the winner's bid; zero if the winner's weight is zero.
struct SecondPriceOutcome {
  AgentId winner = 0;
  double price = 0.0;
};
SecondPriceOutcome weighted_second_price(std::span<const double> weights,
                                         std::span<const double> bids);

/// Explore with probability epsilon (uniform arm, no payment, estimates
/// updated); otherwise follow the expert with the highest estimated reported
/// welfare and charge the payment implied by the estimated envelope.
class ContextualGreedy final : public Mechanism {
 public:
  ContextualGreedy(ExpertClass experts, std::size_t num_agents, double epsilon);

  MechanismKind kind() const override { return MechanismKind::kContextualGreedy; }
  std::size_t num_agents() const override { return num_agents_; }
  std::vector<double> arm_distribution(std::span<const double> bids,
                                       std::span<const double> context_probs) const override;
  ArmDraft step(std::span<const double> bids, ContextId context,
                const RoundStreams& streams) override;
  double observe(std::span<const double> bids, ContextId context, const ArmDraft& draft,
                 int click) override;
  PiTable estimates() const override;
  std::uint64_t estimate_version() const override { return version_; }
  std::uint64_t rounds_played() const override { return round_; }

  /// Freezes estimates() at `table`; explore rounds are still recorded.
  void pin_estimates(PiTable table);

  /// Raw importance-weighted estimate K * hits / |t_e| before clamping.
  double raw_estimate(AgentId agent, ExpertId expert) const;

  double epsilon() const { return epsilon_; }
  const std::vector<std::uint64_t>& explore_rounds() const { return explore_rounds_; }
  const std::vector<std::uint64_t>& explore_counts() const { return explore_counts_; }
  const ExpertClass& experts() const { return experts_; }

 private:
  ExpertClass experts_;
  std::size_t num_agents_;
  double epsilon_;
  std::uint64_t round_ = 0;
  std::uint64_t version_ = 0;
  std::vector<std::uint64_t> explore_rounds_;
  std::vector<std::uint64_t> explore_counts_;  // n(a)
  Matrix<std::uint64_t> hits_;                 // explore rounds with h(x)=a, arm a, click
  std::optional<PiTable> pinned_;
  std::optional<ArmDraft> pending_;
};

/// Contextless epsilon-greedy: running-mean CTR estimates from explore rounds
/// and a weighted second price auction in exploit rounds.
class StochasticGreedy final : public Mechanism {
 public:
  StochasticGreedy(std::size_t num_agents, double epsilon);

  MechanismKind kind() const override { return MechanismKind::kStochasticGreedy; }
  std::size_t num_agents() const override { return ctr_hat_.size(); }
  std::vector<double> arm_distribution(std::span<const double> bids,
                                       std::span<const double> context_probs) const override;
  ArmDraft step(std::span<const double> bids, ContextId context,
                const RoundStreams& streams) override;
  double observe(std::span<const double> bids, ContextId context, const ArmDraft& draft,
                 int click) override;
  PiTable estimates() const override;
  std::uint64_t estimate_version() const override { return version_; }
  std::uint64_t rounds_played() const override { return round_; }

  double epsilon() const { return epsilon_; }
  const std::vector<double>& ctr_estimates() const { return ctr_hat_; }
  const std::vector<std::uint64_t>& explore_counts() const { return explore_counts_; }

 private:
  double epsilon_;
  std::uint64_t round_ = 0;
  std::uint64_t version_ = 0;
  std::vector<double> ctr_hat_;
  std::vector<std::uint64_t> explore_counts_;
  std::optional<ArmDraft> pending_;
};

/// Round-robin exploration for a fixed number of rounds, then a weighted
/// second price auction on frozen estimates.
class ExploreThenCommit final : public Mechanism {
 public:
  ExploreThenCommit(std::size_t num_agents, std::uint64_t explore_length);

  MechanismKind kind() const override { return MechanismKind::kExploreThenCommit; }
  std::size_t num_agents() const override { return ctr_hat_.size(); }
  std::vector<double> arm_distribution(std::span<const double> bids,
                                       std::span<const double> context_probs) const override;
  ArmDraft step(std::span<const double> bids, ContextId context,
                const RoundStreams& streams) override;
  double observe(std::span<const double> bids, ContextId context, const ArmDraft& draft,
                 int click) override;
  PiTable estimates() const override;
  std::uint64_t estimate_version() const override { return version_; }
  std::uint64_t rounds_played() const override { return round_; }

  std::uint64_t explore_length() const { return explore_length_; }
  const std::vector<double>& ctr_estimates() const { return ctr_hat_; }

 private:
  std::uint64_t explore_length_;
  std::uint64_t round_ = 0;
  std::uint64_t version_ = 0;
  std::vector<double> ctr_hat_;
  std::vector<std::uint64_t> explore_counts_;
  std::optional<ArmDraft> pending_;
};

/// Follows the best expert under the exact click probabilities and charges
/// the exact envelope payment. Never explores.
class PerfectInfoGreedy final : public Mechanism {
 public:
  PerfectInfoGreedy(ExpertClass experts, PiTable exact);

  MechanismKind kind() const override { return MechanismKind::kPerfectInfo; }
  std::size_t num_agents() const override { return exact_.num_agents(); }
  std::vector<double> arm_distribution(std::span<const double> bids,
                                       std::span<const double> context_probs) const override;
  ArmDraft step(std::span<const double> bids, ContextId context,
                const RoundStreams& streams) override;
  double observe(std::span<const double> bids, ContextId context, const ArmDraft& draft,
                 int click) override;
  PiTable estimates() const override { return exact_; }
  std::uint64_t estimate_version() const override { return 0; }
  std::uint64_t rounds_played() const override { return round_; }

 private:
  ExpertClass experts_;
  PiTable exact_;
  std::uint64_t round_ = 0;
  std::optional<ArmDraft> pending_;
};

// Exploration-rate presets.

/// 2 (K log T)^(1/3) T^(-1/3), used by the stochastic regret analysis.
double epsilon_stochastic_proof(std::size_t horizon, std::size_t num_agents);
/// 2 K^(1/3) (T log T)^(-1/3), the headline setting of the stochastic bound.
double epsilon_stochastic_statement(std::size_t horizon, std::size_t num_agents);
/// 2 T^(-1/3) log(T m K)^(1/3) K^(4/3).
double epsilon_contextual(std::size_t horizon, std::size_t num_experts, std::size_t num_agents);
/// Clamps into the open interval (0, 1).
double clamp_epsilon(double epsilon);

struct MechanismOptions {
  MechanismKind kind = MechanismKind::kContextualGreedy;
  double epsilon = 0.1;
  std::uint64_t etc_explore_length = 0;
};

/// Builds a mechanism for `instance`. Stochastic mechanisms range over the
/// constant experts; the contextual ones over `experts`.
std::unique_ptr<Mechanism> make_mechanism(const MechanismOptions& options,
                                          const AuctionInstance& instance,
                                          const ExpertClass& experts);

/// The expert class a mechanism of `kind` competes against.
ExpertClass mechanism_experts(MechanismKind kind, const AuctionInstance& instance,
                              const ExpertClass& experts);

}  // namespace ppcb
