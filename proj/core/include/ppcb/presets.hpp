#pragma once

// Experiment presets: each resolves an ExperimentSpec into runs, writes CSV
// artifacts and a text report into the spec's output directory.

#include <filesystem>
#include <string>
#include <vector>

#include "ppcb/config.hpp"
#include "ppcb/experiments.hpp"
#include "ppcb/io.hpp"

namespace ppcb {

struct PresetResult {
  std::vector<CriterionResult> criteria;
  std::vector<std::filesystem::path> artifacts;
  std::string report;

  /// True when every evaluated criterion passed (vacuously for simulate).
  bool passed() const;
};

/// The instance named by the spec, or the preset's built-in fixture.
InstanceFile resolve_instance(const ExperimentSpec& spec);

/// Exploration rate for `mechanism` on `instance` at `horizon`: the explicit
/// epsilon, else the named formula, else the mechanism's default formula.
double resolve_epsilon(const ExperimentSpec& spec, const InstanceFile& instance, std::size_t horizon);

/// The RunConfig of the simulate preset. Throws std::invalid_argument if the
/// policies do not fit the instance.
RunConfig simulate_config(const ExperimentSpec& spec, const InstanceFile& instance);

PresetResult run_preset(const ExperimentSpec& spec);

}  // namespace ppcb
