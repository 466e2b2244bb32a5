#pragma once

// Experiment configuration files.
//
// Schema (every field but "preset" is optional):
//   {
//     "preset":             "simulate" | "scaling" | "corruption-sweep" |
//                           "truthfulness-audit" | "replicate-example" | "audit-bounds",
//     "instance":           "path/to/instance.json",  // relative to the config file
//     "seed":               0,        // the only source of randomness
//     "seeds":              1,        // replicas, >= 1
//     "threads":            1,
//     "output_dir":         "out",    // default: $PPCB_OUTPUT_DIR, else "ppcb-out"
//     "horizons":           [10000],  // strictly increasing
//     "corruption":         [0],      // budgets C
//     "alphas":             [0.05],
//     "epsilon":            0.2,      // overrides the preset formula
//     "epsilon_preset":     "stochastic-proof" | "stochastic-statement" | "contextual",
//     "mechanism":          "contextual-greedy" | "stochastic-greedy" |
//                           "explore-then-commit" | "perfect-info",
//     "etc_explore_length": 1000,
//     "adversary":          {"kind": "none", "budget": 0, "target": 0, "flip_prob": 0.5},
//     "policies":           "truthful" | [policy ...],  // one per agent, or one for all
//                           // policy: "truthful" or {"kind": "alpha-rational", "alpha": 0.1}
//                           //         or {"kind": "fixed-bid", "bid": 0.4}
//     "estimator":          "expected" | "realized",
//     "exact_estimates":    false,    // pin contextual estimates to the exact table
//     "write_rounds":       true      // per-round CSVs for simulate
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppcb/adversary.hpp"
#include "ppcb/agents.hpp"
#include "ppcb/mechanisms.hpp"
#include "ppcb/simulator.hpp"

namespace ppcb {

enum class Preset {
  kSimulate,
  kScaling,
  kCorruptionSweep,
  kTruthfulnessAudit,
  kReplicateExample,
  kAuditBounds,
};

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);
std::vector<std::string_view> preset_names();

enum class EpsilonPreset { kStochasticProof, kStochasticStatement, kContextual };

std::string_view to_string(EpsilonPreset preset);
std::optional<EpsilonPreset> parse_epsilon_preset(std::string_view name);

struct ExperimentSpec {
  Preset preset = Preset::kSimulate;
  std::optional<std::filesystem::path> instance_path;
  std::optional<std::uint64_t> seed;  // unset: the preset's default
  std::size_t seeds = 0;               // 0: the preset's default
  std::size_t threads = 1;
  std::filesystem::path output_dir;
  std::vector<std::size_t> horizons;
  std::vector<std::uint64_t> corruption;
  std::vector<double> alphas;
  std::optional<double> epsilon;
  std::optional<EpsilonPreset> epsilon_preset;
  MechanismKind mechanism = MechanismKind::kContextualGreedy;
  std::optional<std::uint64_t> etc_explore_length;
  AdversaryOptions adversary;
  std::vector<AgentPolicy> policies;  // empty: truthful; one entry applies to all
  RegretEstimator estimator = RegretEstimator::kExpected;
  bool exact_estimates = false;
  bool write_rounds = true;
};

struct ConfigIssue {
  std::string field;  // JSON pointer, e.g. "/adversary/kind"
  std::size_t line = 0;  // 1-based; 0 when unknown
  std::string message;
};

std::string format_issue(const ConfigIssue& issue);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Fills the defaults of the chosen preset into the fields left unset.
void fill_defaults(ExperimentSpec& spec);

/// Checks the invariants of a resolved spec.
std::vector<ConfigIssue> validate_spec(const ExperimentSpec& spec);

/// Parses JSON text; `base_dir` resolves a relative instance path. With
/// `preset` given, the "preset" field becomes optional and must agree with it
/// when present. Throws ConfigError listing every problem found.
ExperimentSpec parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {},
                                 std::optional<Preset> preset = std::nullopt);
ExperimentSpec parse_config(const std::filesystem::path& file,
                            std::optional<Preset> preset = std::nullopt);

/// The resolved spec as JSON in the config schema, for --dry-run.
std::string spec_to_json(const ExperimentSpec& spec);

/// $PPCB_OUTPUT_DIR if set and non-empty, else "ppcb-out".
std::filesystem::path default_output_dir();

}  // namespace ppcb
