#include "ppcb/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppcb {
namespace {

constexpr double kUtilityTol = 1e-12;
constexpr int kGridSteps = 1000;

}  // namespace

AgentPolicy AgentPolicy::alpha_rational(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha outside [0,1]");
  return {Kind::kAlphaRational, alpha, 0.0};
}

AgentPolicy AgentPolicy::fixed(double bid) {
  if (!(bid >= 0.0 && bid <= 1.0)) throw std::invalid_argument("fixed bid outside [0,1]");
  return {Kind::kFixedBid, 0.0, bid};
}

std::string_view to_string(AgentPolicy::Kind kind) {
  switch (kind) {
    case AgentPolicy::Kind::kTruthful: return "truthful";
    case AgentPolicy::Kind::kAlphaRational: return "alpha-rational";
    case AgentPolicy::Kind::kFixedBid: return "fixed-bid";
  }
  return "unknown";
}

std::optional<AgentPolicy::Kind> parse_policy_kind(std::string_view name) {
  for (auto kind : {AgentPolicy::Kind::kTruthful, AgentPolicy::Kind::kAlphaRational,
                    AgentPolicy::Kind::kFixedBid}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

UtilityCurve::UtilityCurve(const MechanismSnapshot& snapshot, std::span<const double> bids,
                           AgentId agent, double value)
    : exact_(snapshot.exact),
      agent_(agent),
      value_(value),
      exact_envelope_(build_envelope(snapshot.exact, bids, agent)),
      payment_(build_envelope(snapshot.estimated, bids, agent),
               {snapshot.adjustments.begin(), snapshot.adjustments.end()}) {
  if (snapshot.estimated.num_agents() != snapshot.exact.num_agents() ||
      snapshot.estimated.num_experts() != snapshot.exact.num_experts()) {
    throw std::invalid_argument("estimated and exact tables differ in shape");
  }
}

double UtilityCurve::true_click_prob(double bid) const {
  return exact_(agent_, payment_.envelope().expert_at(bid));
}

double UtilityCurve::operator()(double bid) const {
  return (value_ - payment_(bid)) * true_click_prob(bid);
}

std::vector<double> UtilityCurve::critical_bids() const {
  std::vector<double> out = exact_envelope_.breakpoints;
  const auto& est = payment_.envelope().breakpoints;
  out.insert(out.end(), est.begin(), est.end());
  for (const auto& adj : payment_.adjustments()) {
    out.push_back(adj.lo);
    out.push_back(adj.hi);
  }
  std::erase_if(out, [](double b) { return b < 0.0 || b > 1.0; });
  return out;
}

BestResponse best_response(const MechanismSnapshot& snapshot, std::span<const double> bids,
                           AgentId agent, double value) {
  const UtilityCurve u(snapshot, bids, agent, value);

  std::vector<double> candidates = u.critical_bids();
  candidates.reserve(candidates.size() + kGridSteps + 2);
  for (int i = 0; i <= kGridSteps; ++i) candidates.push_back(static_cast<double>(i) / kGridSteps);

  BestResponse r;
  r.utility_at_truthful = u(value);
  r.utility_at_best = r.utility_at_truthful;
  std::vector<double> utilities(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    utilities[i] = u(candidates[i]);
    r.utility_at_best = std::max(r.utility_at_best, utilities[i]);
  }

  r.gain = std::max(0.0, r.utility_at_best - r.utility_at_truthful);
  if (r.gain <= kUtilityTol) {
    r.best_bid = value;
    return r;
  }
  double furthest = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (utilities[i] < r.utility_at_best - kUtilityTol) continue;
    const double distance = std::abs(candidates[i] - value);
    if (distance > furthest) {
      furthest = distance;
      r.best_bid = candidates[i];
    }
  }
  return r;
}

double choose_bid(const AgentPolicy& policy, double value, const BestResponse* response) {
  switch (policy.kind) {
    case AgentPolicy::Kind::kTruthful:
      return value;
    case AgentPolicy::Kind::kFixedBid:
      return policy.fixed_bid;
    case AgentPolicy::Kind::kAlphaRational:
      if (response == nullptr) {
        throw std::invalid_argument("alpha-rational bid needs a best response");
      }
      return response->gain <= policy.alpha ? value : response->best_bid;
  }
  return value;
}

}  // namespace ppcb
