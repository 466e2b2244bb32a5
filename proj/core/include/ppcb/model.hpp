#pragma once

// Ground-truth auction instances and the exact quantities that the
// mechanisms try to learn.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ppcb {

using AgentId = std::size_t;
using ExpertId = std::size_t;
using ContextId = std::size_t;
using BidProfile = std::vector<double>;

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Agents, a finite context distribution, click-through rates and values.
struct AuctionInstance {
  std::size_t num_agents = 0;
  std::size_t num_contexts = 0;
  std::vector<double> context_probs;  // p(x)
  Matrix<double> ctr;                 // rho(x, a), rows are contexts
  std::vector<double> values;         // mu(a)
  std::size_t horizon = 0;

  double click_rate(AgentId agent, ContextId context) const { return ctr(context, agent); }
};

/// A finite class of experts; table(h, x) is the agent expert h recommends
/// on context x.
struct ExpertClass {
  Matrix<AgentId> table;

  std::size_t num_experts() const { return table.rows(); }
  std::size_t num_contexts() const { return table.cols(); }
  AgentId recommend(ExpertId expert, ContextId context) const { return table(expert, context); }
};

/// Click probabilities Pi(a, h): the probability agent a is clicked when the
/// principal follows expert h. Either the exact table or an estimate.
class PiTable {
 public:
  enum class Kind { kExact, kEstimated };

  PiTable() = default;
  PiTable(std::size_t num_agents, std::size_t num_experts, Kind kind)
      : values_(num_agents, num_experts, 0.0), kind_(kind) {}

  std::size_t num_agents() const { return values_.rows(); }
  std::size_t num_experts() const { return values_.cols(); }
  Kind kind() const { return kind_; }

  double operator()(AgentId a, ExpertId h) const { return values_(a, h); }
  double& operator()(AgentId a, ExpertId h) { return values_(a, h); }
  const Matrix<double>& matrix() const { return values_; }

  bool operator==(const PiTable&) const = default;

 private:
  Matrix<double> values_;
  Kind kind_ = Kind::kExact;
};

/// Sum over contexts of p(x) * rho(a, x) * 1{h(x) = a}.
double induced_click_prob(const AuctionInstance& instance, const ExpertClass& experts,
                          AgentId agent, ExpertId expert);

PiTable exact_pi_table(const AuctionInstance& instance, const ExpertClass& experts);

/// Sum over agents of value(a) * Pi(a, h).
double expected_welfare(const AuctionInstance& instance, const ExpertClass& experts,
                        ExpertId expert, std::span<const double> values);

/// Sum over agents of bid(a) * Pi(a, h).
double reported_welfare(const PiTable& pi, ExpertId expert, std::span<const double> bids);

/// Expert with the highest reported welfare; ties go to the lowest index.
ExpertId best_expert(const PiTable& pi, std::span<const double> bids);

/// Context-averaged click-through rate of one agent.
double stochastic_ctr(const AuctionInstance& instance, AgentId agent);

/// True when, for every pair of experts and every agent, the indicator
/// vectors 1{h1(x)=a} and 1{h2(x)=a} are pointwise comparable.
bool is_preordered(const ExpertClass& experts, std::size_t num_agents);

/// Every invariant violation as a readable message; empty means valid.
std::vector<std::string> validate_instance(const AuctionInstance& instance,
                                           const ExpertClass& experts);

/// Throws std::invalid_argument listing all violations, if any.
void require_valid(const AuctionInstance& instance, const ExpertClass& experts);

/// Expert h_a always recommends agent a.
ExpertClass constant_experts(std::size_t num_agents, std::size_t num_contexts);

// Reference fixtures.

/// Three equiprobable contexts, three agents, three experts; mu = (0.7, 0.1, 0.2).
AuctionInstance example_instance(std::size_t horizon = 10000);
ExpertClass example_experts();

/// Single-context instance whose click-through rates are `ctrs`.
AuctionInstance stochastic_instance(std::vector<double> values, std::vector<double> ctrs,
                                    std::size_t horizon);

}  // namespace ppcb
