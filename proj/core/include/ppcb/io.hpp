#pragma once

// Instance files (JSON) and run artifacts (CSV).
//
// Instance schema:
//   {
//     "context_probs": [p(x) ...],              // sums to 1
//     "ctr":           [[rho(x, a) ...] ...],   // one row per context
//     "values":        [mu(a) ...],             // one per agent
//     "horizon":       10000,                   // optional, default 10000
//     "experts":       [[h(x) ...] ...]         // optional, one row per expert;
//                                               // default: constant experts
//   }

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppcb/model.hpp"
#include "ppcb/simulator.hpp"

namespace ppcb {

struct InstanceFile {
  AuctionInstance instance;
  ExpertClass experts;
};

/// Parses and validates; throws std::invalid_argument with every problem found.
InstanceFile parse_instance_json(const std::string& text);
InstanceFile load_instance(const std::filesystem::path& path);
std::string instance_to_json(const AuctionInstance& instance, const ExpertClass& experts);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// One row per round: round, context, explore, arm, click, corrupted, payment,
/// bid_0..bid_{K-1}, cum_regret_realized, cum_regret_expected.
void write_round_csv(std::ostream& out, const RunLog& log);

/// One row per run with final regrets and audit counters.
void write_summary_csv(std::ostream& out, const std::vector<RunLog>& logs);

/// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ppcb
