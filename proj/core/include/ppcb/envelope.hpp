#pragma once

// Click probability of one agent as a function of its own bid, and the
// payment rule that makes that allocation truthful.
//
// With the other bids fixed, each expert's reported welfare is an affine
// function of the agent's bid whose slope is Pi(agent, h). Following the
// best expert therefore yields the upper envelope of m lines, and the
// agent's click probability g(b) is the slope of the envelope at b: a
// nondecreasing step function with at most m - 1 jumps.

#include <cstddef>
#include <span>
#include <vector>

#include "ppcb/model.hpp"

namespace ppcb {

/// Piecewise-constant g(agent, .) over [0, 1].
///
/// Segment k covers [breakpoints[k-1], breakpoints[k]) with the conventions
/// breakpoints[-1] = 0 and the last segment closed at 1. At a breakpoint the
/// expert with the larger slope has already taken over.
struct Envelope {
  AgentId agent = 0;
  std::vector<double> breakpoints;
  std::vector<ExpertId> segment_expert;
  std::vector<double> segment_g;

  std::size_t num_segments() const { return segment_g.size(); }
  std::size_t segment_at(double bid) const;
  double segment_start(std::size_t k) const { return k == 0 ? 0.0 : breakpoints[k - 1]; }
  ExpertId expert_at(double bid) const { return segment_expert[segment_at(bid)]; }
  double g(double bid) const { return segment_g[segment_at(bid)]; }

  /// Exact integral of g over [0, bid], by summing whole segments.
  double integral(double bid) const;
};

/// `bids` is a full profile; the entry at `agent` is ignored.
Envelope build_envelope(const PiTable& pi, std::span<const double> bids, AgentId agent);

/// bid - (integral of g on [0, bid]) / g(bid), or 0 where g(bid) = 0.
/// Always in [0, bid].
double myerson_payment(const Envelope& envelope, double bid);

/// Adds `delta` to the payment for bids inside the interval. Used to study
/// payment rules that deviate slightly from the truthful one.
struct PaymentAdjustment {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = false;
  bool hi_closed = true;
  double delta = 0.0;

  bool contains(double bid) const {
    const bool above = lo_closed ? bid >= lo : bid > lo;
    const bool below = hi_closed ? bid <= hi : bid < hi;
    return above && below;
  }
};

/// Payment per click charged by a mechanism whose allocation follows the
/// envelope built from estimated click probabilities.
class PaymentRule {
 public:
  explicit PaymentRule(Envelope envelope, std::vector<PaymentAdjustment> adjustments = {})
      : envelope_(std::move(envelope)), adjustments_(std::move(adjustments)) {}

  double operator()(double bid) const;
  const Envelope& envelope() const { return envelope_; }
  const std::vector<PaymentAdjustment>& adjustments() const { return adjustments_; }

 private:
  Envelope envelope_;
  std::vector<PaymentAdjustment> adjustments_;
};

/// The worked example's perturbation: +0.001 on [0.3, 0.6) and -0.001 on
/// [0.6, 1]. The intervals follow the envelope's segments, which own their
/// left endpoints.
std::vector<PaymentAdjustment> example_payment_perturbation();

}  // namespace ppcb
