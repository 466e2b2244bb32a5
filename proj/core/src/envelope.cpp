#include "ppcb/envelope.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ppcb {
namespace {

constexpr double kTieTol = 1e-14;
// Bids this close below a breakpoint already belong to the right segment.
constexpr double kSnap = 1e-12;

struct Line {
  double slope;
  double intercept;
  ExpertId expert;
};

// True when `a` should own the envelope over `b` at a point where their
// values agree within kTieTol: larger slope first, then lower index.
bool wins_tie(const Line& a, const Line& b) {
  if (a.slope != b.slope) return a.slope > b.slope;
  return a.expert < b.expert;
}

}  // namespace

std::size_t Envelope::segment_at(double bid) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), bid + kSnap) -
                                  breakpoints.begin());
}

double Envelope::integral(double bid) const {
  bid = std::clamp(bid, 0.0, 1.0);
  double total = 0.0;
  const std::size_t last = segment_at(bid);
  for (std::size_t k = 0; k < last; ++k) {
    total += (breakpoints[k] - segment_start(k)) * segment_g[k];
  }
  total += (bid - segment_start(last)) * segment_g[last];
  return total;
}

Envelope build_envelope(const PiTable& pi, std::span<const double> bids, AgentId agent) {
  if (agent >= pi.num_agents()) throw std::out_of_range("agent index out of range");
  if (bids.size() != pi.num_agents()) {
    throw std::invalid_argument("bid profile length does not match PiTable");
  }
  if (pi.num_experts() == 0) throw std::invalid_argument("PiTable has no experts");

  std::vector<Line> lines;
  lines.reserve(pi.num_experts());
  for (ExpertId h = 0; h < pi.num_experts(); ++h) {
    double intercept = 0.0;
    for (AgentId i = 0; i < pi.num_agents(); ++i) {
      if (i != agent) intercept += bids[i] * pi(i, h);
    }
    lines.push_back({pi(agent, h), intercept, h});
  }

  // Owner at bid 0.
  std::size_t current = 0;
  for (std::size_t j = 1; j < lines.size(); ++j) {
    const double diff = lines[j].intercept - lines[current].intercept;
    if (diff > kTieTol || (diff >= -kTieTol && wins_tie(lines[j], lines[current]))) current = j;
  }

  Envelope env;
  env.agent = agent;
  env.segment_expert.push_back(lines[current].expert);
  env.segment_g.push_back(lines[current].slope);

  double position = 0.0;
  for (;;) {
    const Line& owner = lines[current];
    std::size_t next = lines.size();
    double next_position = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (lines[j].slope <= owner.slope) continue;
      const double crossing = std::max(
          position, (owner.intercept - lines[j].intercept) / (lines[j].slope - owner.slope));
      if (crossing < next_position - kTieTol ||
          (crossing <= next_position + kTieTol && next < lines.size() &&
           wins_tie(lines[j], lines[next]))) {
        next = j;
        next_position = std::min(next_position, crossing);
      }
    }
    if (next == lines.size() || next_position >= 1.0) break;
    if (next_position <= position) {
      // Crossing at the current position: the steeper line owns this segment.
      env.segment_expert.back() = lines[next].expert;
      env.segment_g.back() = lines[next].slope;
    } else {
      env.breakpoints.push_back(next_position);
      env.segment_expert.push_back(lines[next].expert);
      env.segment_g.push_back(lines[next].slope);
      position = next_position;
    }
    current = next;
  }
  return env;
}

double myerson_payment(const Envelope& envelope, double bid) {
  bid = std::clamp(bid, 0.0, 1.0);
  const double g = envelope.g(bid);
  if (g <= 0.0) return 0.0;
  const double payment = bid - envelope.integral(bid) / g;
  return std::clamp(payment, 0.0, bid);
}

double PaymentRule::operator()(double bid) const {
  double payment = myerson_payment(envelope_, bid);
  for (const auto& adj : adjustments_) {
    if (adj.contains(bid)) payment += adj.delta;
  }
  return payment;
}

std::vector<PaymentAdjustment> example_payment_perturbation() {
  return {
      PaymentAdjustment{0.3, 0.6, true, false, +0.001},
      PaymentAdjustment{0.6, 1.0, true, true, -0.001},
  };
}

}  // namespace ppcb
