#include "ppcb/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppcb {
namespace {

void check_agent(const AuctionInstance& instance, AgentId agent) {
  if (agent >= instance.num_agents) {
    throw std::out_of_range("agent index " + std::to_string(agent) + " out of range [0, " +
                            std::to_string(instance.num_agents) + ")");
  }
}

void check_expert(const ExpertClass& experts, ExpertId expert) {
  if (expert >= experts.num_experts()) {
    throw std::out_of_range("expert index " + std::to_string(expert) + " out of range [0, " +
                            std::to_string(experts.num_experts()) + ")");
  }
}

}  // namespace

double induced_click_prob(const AuctionInstance& instance, const ExpertClass& experts,
                          AgentId agent, ExpertId expert) {
  check_agent(instance, agent);
  check_expert(experts, expert);
  if (experts.num_contexts() != instance.num_contexts) {
    throw std::invalid_argument("expert table context count does not match instance");
  }
  double total = 0.0;
  for (ContextId x = 0; x < instance.num_contexts; ++x) {
    if (experts.recommend(expert, x) == agent) {
      total += instance.context_probs[x] * instance.click_rate(agent, x);
    }
  }
  return total;
}

PiTable exact_pi_table(const AuctionInstance& instance, const ExpertClass& experts) {
  PiTable pi(instance.num_agents, experts.num_experts(), PiTable::Kind::kExact);
  for (AgentId a = 0; a < instance.num_agents; ++a) {
    for (ExpertId h = 0; h < experts.num_experts(); ++h) {
      pi(a, h) = induced_click_prob(instance, experts, a, h);
    }
  }
  return pi;
}

double expected_welfare(const AuctionInstance& instance, const ExpertClass& experts,
                        ExpertId expert, std::span<const double> values) {
  if (values.size() != instance.num_agents) {
    throw std::invalid_argument("value vector length does not match number of agents");
  }
  double total = 0.0;
  for (AgentId a = 0; a < instance.num_agents; ++a) {
    total += values[a] * induced_click_prob(instance, experts, a, expert);
  }
  return total;
}

double reported_welfare(const PiTable& pi, ExpertId expert, std::span<const double> bids) {
  double total = 0.0;
  for (AgentId a = 0; a < pi.num_agents(); ++a) total += bids[a] * pi(a, expert);
  return total;
}

ExpertId best_expert(const PiTable& pi, std::span<const double> bids) {
  ExpertId best = 0;
  double best_welfare = reported_welfare(pi, 0, bids);
  for (ExpertId h = 1; h < pi.num_experts(); ++h) {
    const double w = reported_welfare(pi, h, bids);
    if (w > best_welfare) {
      best = h;
      best_welfare = w;
    }
  }
  return best;
}

double stochastic_ctr(const AuctionInstance& instance, AgentId agent) {
  check_agent(instance, agent);
  double total = 0.0;
  for (ContextId x = 0; x < instance.num_contexts; ++x) {
    total += instance.context_probs[x] * instance.click_rate(agent, x);
  }
  return total;
}

bool is_preordered(const ExpertClass& experts, std::size_t num_agents) {
  const std::size_t m = experts.num_experts();
  for (ExpertId h1 = 0; h1 < m; ++h1) {
    for (ExpertId h2 = h1 + 1; h2 < m; ++h2) {
      for (AgentId a = 0; a < num_agents; ++a) {
        bool first_dominates = true;
        bool second_dominates = true;
        for (ContextId x = 0; x < experts.num_contexts(); ++x) {
          const bool i1 = experts.recommend(h1, x) == a;
          const bool i2 = experts.recommend(h2, x) == a;
          if (i1 && !i2) second_dominates = false;
          if (i2 && !i1) first_dominates = false;
        }
        if (!first_dominates && !second_dominates) return false;
      }
    }
  }
  return true;
}

std::vector<std::string> validate_instance(const AuctionInstance& instance,
                                           const ExpertClass& experts) {
  std::vector<std::string> violations;
  auto add = [&](const std::string& message) { violations.push_back(message); };

  if (instance.num_agents < 2) add("num_agents must be at least 2");
  if (instance.num_contexts < 1) add("num_contexts must be positive");
  if (instance.horizon < 1) add("horizon must be positive");

  if (instance.context_probs.size() != instance.num_contexts) {
    add("context_probs has " + std::to_string(instance.context_probs.size()) +
        " entries, expected " + std::to_string(instance.num_contexts));
  } else {
    double sum = 0.0;
    for (std::size_t x = 0; x < instance.num_contexts; ++x) {
      const double p = instance.context_probs[x];
      if (!(p >= 0.0)) add("context_probs[" + std::to_string(x) + "] is negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "context_probs sum to " << sum << ", expected 1";
      add(os.str());
    }
  }

  if (instance.ctr.rows() != instance.num_contexts || instance.ctr.cols() != instance.num_agents) {
    add("ctr must be num_contexts x num_agents");
  } else {
    for (std::size_t x = 0; x < instance.ctr.rows(); ++x) {
      for (std::size_t a = 0; a < instance.ctr.cols(); ++a) {
        const double r = instance.ctr(x, a);
        if (!(r >= 0.0 && r <= 1.0)) {
          add("ctr[" + std::to_string(x) + "][" + std::to_string(a) + "] outside [0,1]");
        }
      }
    }
  }

  if (instance.values.size() != instance.num_agents) {
    add("values has " + std::to_string(instance.values.size()) + " entries, expected " +
        std::to_string(instance.num_agents));
  } else {
    for (std::size_t a = 0; a < instance.values.size(); ++a) {
      const double v = instance.values[a];
      if (!(v >= 0.0 && v <= 1.0)) add("values[" + std::to_string(a) + "] outside [0,1]");
    }
  }

  if (experts.num_experts() < 1) add("expert class is empty");
  if (experts.num_contexts() != instance.num_contexts) {
    add("expert table has " + std::to_string(experts.num_contexts()) + " contexts, expected " +
        std::to_string(instance.num_contexts));
  }
  for (ExpertId h = 0; h < experts.num_experts(); ++h) {
    for (ContextId x = 0; x < experts.num_contexts(); ++x) {
      if (experts.recommend(h, x) >= instance.num_agents) {
        add("expert " + std::to_string(h) + " recommends agent " +
            std::to_string(experts.recommend(h, x)) + " on context " + std::to_string(x) +
            ", not a valid agent");
      }
    }
  }
  return violations;
}

void require_valid(const AuctionInstance& instance, const ExpertClass& experts) {
  const auto violations = validate_instance(instance, experts);
  if (violations.empty()) return;
  std::string message = "invalid instance:";
  for (const auto& v : violations) message += "\n  " + v;
  throw std::invalid_argument(message);
}

ExpertClass constant_experts(std::size_t num_agents, std::size_t num_contexts) {
  ExpertClass experts{Matrix<AgentId>(num_agents, num_contexts)};
  for (AgentId a = 0; a < num_agents; ++a) {
    for (ContextId x = 0; x < num_contexts; ++x) experts.table(a, x) = a;
  }
  return experts;
}

AuctionInstance example_instance(std::size_t horizon) {
  AuctionInstance instance;
  instance.num_agents = 3;
  instance.num_contexts = 3;
  instance.context_probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  instance.ctr = Matrix<double>(3, 3);
  const double rho[3][3] = {{0.7, 0.4, 0.9}, {0.2, 0.2, 0.5}, {0.6, 0.8, 0.3}};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 3; ++a) instance.ctr(x, a) = rho[x][a];
  // Truthful bids of agents 1 and 2 reproduce the example's opponent profile.
  instance.values = {0.7, 0.1, 0.2};
  instance.horizon = horizon;
  return instance;
}

ExpertClass example_experts() {
  ExpertClass experts{Matrix<AgentId>(3, 3)};
  const AgentId d[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (std::size_t h = 0; h < 3; ++h)
    for (std::size_t x = 0; x < 3; ++x) experts.table(h, x) = d[h][x];
  return experts;
}

AuctionInstance stochastic_instance(std::vector<double> values, std::vector<double> ctrs,
                                    std::size_t horizon) {
  if (values.size() != ctrs.size()) {
    throw std::invalid_argument("values and ctrs must have the same length");
  }
  AuctionInstance instance;
  instance.num_agents = values.size();
  instance.num_contexts = 1;
  instance.context_probs = {1.0};
  instance.ctr = Matrix<double>(1, ctrs.size());
  for (std::size_t a = 0; a < ctrs.size(); ++a) instance.ctr(0, a) = ctrs[a];
  instance.values = std::move(values);
  instance.horizon = horizon;
  return instance;
}

}  // namespace ppcb
