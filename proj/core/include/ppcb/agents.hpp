#pragma once

// Bidding strategies and the best-response oracle that audits them.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ppcb/envelope.hpp"
#include "ppcb/model.hpp"

namespace ppcb {

struct AgentPolicy {
  enum class Kind { kTruthful, kAlphaRational, kFixedBid };

  Kind kind = Kind::kTruthful;
  double alpha = 0.0;      // alpha-rational tolerance, in [0, 1]
  double fixed_bid = 0.0;  // bid of a fixed-bid agent, in [0, 1]

  static AgentPolicy truthful() { return {}; }
  static AgentPolicy alpha_rational(double alpha);
  static AgentPolicy fixed(double bid);
};

std::string_view to_string(AgentPolicy::Kind kind);
std::optional<AgentPolicy::Kind> parse_policy_kind(std::string_view name);

struct BestResponse {
  double best_bid = 0.0;
  double utility_at_best = 0.0;
  double utility_at_truthful = 0.0;
  double gain = 0.0;  // utility_at_best - utility_at_truthful, never negative
};

/// What an agent facing an exploit round needs to know: the click
/// probabilities the mechanism allocates and charges with, and the true ones.
struct MechanismSnapshot {
  const PiTable& estimated;
  const PiTable& exact;
  std::span<const PaymentAdjustment> adjustments = {};
};

/// Per-click utility curve of one agent: u(b) = (value - p(b)) * g(b), where
/// p is the mechanism's payment built from the estimates and g is the true
/// probability of a click when the mechanism follows the expert it picks
/// under the estimates.
class UtilityCurve {
 public:
  UtilityCurve(const MechanismSnapshot& snapshot, std::span<const double> bids, AgentId agent,
               double value);

  double operator()(double bid) const;
  double true_click_prob(double bid) const;
  double payment(double bid) const { return payment_(bid); }

  /// Bids where u can change: envelope breakpoints of both tables and the
  /// endpoints of every payment adjustment.
  std::vector<double> critical_bids() const;

 private:
  const PiTable& exact_;
  AgentId agent_;
  double value_;
  Envelope exact_envelope_;
  PaymentRule payment_;
};

/// Maximizes u over a 1e-3 grid plus the critical bids and the value itself.
/// When truthful bidding is optimal within 1e-12 the best bid is the value;
/// otherwise it is the optimal bid furthest from the value.
BestResponse best_response(const MechanismSnapshot& snapshot, std::span<const double> bids,
                           AgentId agent, double value);

double choose_bid(const AgentPolicy& policy, double value, const BestResponse* response);

}  // namespace ppcb
