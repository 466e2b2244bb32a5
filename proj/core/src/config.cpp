#include "ppcb/config.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ppcb {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Preset, std::string_view>, 6> kPresets{{
    {Preset::kSimulate, "simulate"},
    {Preset::kScaling, "scaling"},
    {Preset::kCorruptionSweep, "corruption-sweep"},
    {Preset::kTruthfulnessAudit, "truthfulness-audit"},
    {Preset::kReplicateExample, "replicate-example"},
    {Preset::kAuditBounds, "audit-bounds"},
}};

constexpr std::array<std::pair<EpsilonPreset, std::string_view>, 3> kEpsilonPresets{{
    {EpsilonPreset::kStochasticProof, "stochastic-proof"},
    {EpsilonPreset::kStochasticStatement, "stochastic-statement"},
    {EpsilonPreset::kContextual, "contextual"},
}};

const std::set<std::string> kKnownFields = {
    "preset",    "instance",  "seed",           "seeds",     "threads",
    "output_dir", "horizons", "corruption",     "alphas",    "epsilon",
    "epsilon_preset", "mechanism", "etc_explore_length", "adversary", "policies",
    "estimator", "exact_estimates", "write_rounds"};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Locates `"key"` followed by a colon, starting at `from`. Good enough for
// pointing a human at the offending line.
std::size_t find_key(const std::string& text, const std::string& key, std::size_t from) {
  const std::string quoted = "\"" + key + "\"";
  for (std::size_t pos = text.find(quoted, from); pos != std::string::npos;
       pos = text.find(quoted, pos + 1)) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return pos;
  }
  return std::string::npos;
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  void issue(const std::string& pointer, const std::string& message) {
    issues_.push_back({pointer, line_for(pointer), message});
  }
  std::vector<ConfigIssue>& issues() { return issues_; }

  std::optional<std::uint64_t> count(const json& node, const std::string& pointer) {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<std::int64_t>() >= 0)) {
      issue(pointer, "expected a non-negative integer");
      return std::nullopt;
    }
    return node.get<std::uint64_t>();
  }

  std::optional<double> number(const json& node, const std::string& pointer) {
    if (!node.is_number()) {
      issue(pointer, "expected a number");
      return std::nullopt;
    }
    return node.get<double>();
  }

  std::optional<std::string> string(const json& node, const std::string& pointer) {
    if (!node.is_string()) {
      issue(pointer, "expected a string");
      return std::nullopt;
    }
    return node.get<std::string>();
  }

  std::optional<bool> boolean(const json& node, const std::string& pointer) {
    if (!node.is_boolean()) {
      issue(pointer, "expected true or false");
      return std::nullopt;
    }
    return node.get<bool>();
  }

 private:
  // Line of the innermost object key on the pointer path; array indices
  // resolve to their parent key.
  std::size_t line_for(const std::string& pointer) {
    std::size_t pos = 0, found = std::string::npos;
    std::stringstream parts(pointer);
    std::string part;
    while (std::getline(parts, part, '/')) {
      if (part.empty() || std::isdigit(static_cast<unsigned char>(part[0]))) continue;
      const std::size_t at = find_key(text_, part, pos);
      if (at == std::string::npos) break;
      found = at;
      pos = at + 1;
    }
    return found == std::string::npos ? 0 : line_of_offset(text_, found);
  }

  const std::string& text_;
  std::vector<ConfigIssue> issues_;
};

std::optional<AgentPolicy> read_policy(Reader& r, const json& node, const std::string& pointer) {
  std::string kind_name;
  if (node.is_string()) {
    kind_name = node.get<std::string>();
  } else if (node.is_object() && node.contains("kind") && node["kind"].is_string()) {
    kind_name = node["kind"].get<std::string>();
  } else {
    r.issue(pointer, "expected a policy name or an object with a \"kind\"");
    return std::nullopt;
  }
  const auto kind = parse_policy_kind(kind_name);
  if (!kind) {
    r.issue(node.is_string() ? pointer : pointer + "/kind",
            "unknown policy \"" + kind_name + "\" (truthful, alpha-rational, fixed-bid)");
    return std::nullopt;
  }
  try {
    switch (*kind) {
      case AgentPolicy::Kind::kTruthful:
        return AgentPolicy::truthful();
      case AgentPolicy::Kind::kAlphaRational: {
        if (!node.is_object() || !node.contains("alpha")) {
          r.issue(pointer, "alpha-rational needs \"alpha\"");
          return std::nullopt;
        }
        const auto alpha = r.number(node["alpha"], pointer + "/alpha");
        if (!alpha) return std::nullopt;
        return AgentPolicy::alpha_rational(*alpha);
      }
      case AgentPolicy::Kind::kFixedBid: {
        if (!node.is_object() || !node.contains("bid")) {
          r.issue(pointer, "fixed-bid needs \"bid\"");
          return std::nullopt;
        }
        const auto bid = r.number(node["bid"], pointer + "/bid");
        if (!bid) return std::nullopt;
        return AgentPolicy::fixed(*bid);
      }
    }
  } catch (const std::invalid_argument& e) {
    r.issue(pointer, e.what());
  }
  return std::nullopt;
}

void read_adversary(Reader& r, const json& node, AdversaryOptions& out) {
  if (!node.is_object()) {
    r.issue("/adversary", "expected an object");
    return;
  }
  for (const auto& [key, value] : node.items()) {
    const std::string pointer = "/adversary/" + key;
    if (key == "kind") {
      if (auto name = r.string(value, pointer)) {
        if (auto kind = parse_adversary_kind(*name)) {
          out.kind = *kind;
        } else {
          r.issue(pointer, "unknown adversary \"" + *name + "\"");
        }
      }
    } else if (key == "budget") {
      if (auto v = r.count(value, pointer)) out.budget = *v;
    } else if (key == "target") {
      if (auto v = r.count(value, pointer)) out.target = *v;
    } else if (key == "flip_prob") {
      if (auto v = r.number(value, pointer)) out.flip_prob = *v;
    } else {
      r.issue(pointer, "unknown field");
    }
  }
}

template <typename T, typename Read>
std::vector<T> read_list(Reader& r, const json& node, const std::string& pointer, Read read) {
  std::vector<T> out;
  if (!node.is_array()) {
    r.issue(pointer, "expected an array");
    return out;
  }
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (auto v = read(node[i], pointer + "/" + std::to_string(i))) out.push_back(static_cast<T>(*v));
  }
  return out;
}

}  // namespace

std::string_view to_string(Preset preset) {
  for (const auto& [p, name] : kPresets) {
    if (p == preset) return name;
  }
  return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (const auto& [p, n] : kPresets) {
    if (n == name) return p;
  }
  return std::nullopt;
}

std::vector<std::string_view> preset_names() {
  std::vector<std::string_view> out;
  for (const auto& entry : kPresets) out.push_back(entry.second);
  return out;
}

std::string_view to_string(EpsilonPreset preset) {
  for (const auto& [p, name] : kEpsilonPresets) {
    if (p == preset) return name;
  }
  return "unknown";
}

std::optional<EpsilonPreset> parse_epsilon_preset(std::string_view name) {
  for (const auto& [p, n] : kEpsilonPresets) {
    if (n == name) return p;
  }
  return std::nullopt;
}

std::string format_issue(const ConfigIssue& issue) {
  std::string out = issue.field.empty() ? "(document)" : issue.field;
  if (issue.line > 0) out += " (line " + std::to_string(issue.line) + ")";
  return out + ": " + issue.message;
}

namespace {
std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration";
  for (const auto& issue : issues) out += "\n  " + format_issue(issue);
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("PPCB_OUTPUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return "ppcb-out";
}

void fill_defaults(ExperimentSpec& spec) {
  std::size_t seeds = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> horizons = {10000};
  switch (spec.preset) {
    case Preset::kSimulate:
      if (spec.instance_path) horizons.clear();  // the instance's own horizon
      break;
    case Preset::kScaling:
      seeds = 50, seed = 1, horizons = {10000, 40000, 160000};
      spec.mechanism = MechanismKind::kStochasticGreedy;
      break;
    case Preset::kCorruptionSweep:
      seeds = 30, seed = 2, horizons = {100000};
      spec.mechanism = MechanismKind::kStochasticGreedy;
      break;
    case Preset::kTruthfulnessAudit:
      seeds = 100, seed = 6;
      if (spec.alphas.empty()) spec.alphas = {0.05};
      if (!spec.epsilon) spec.epsilon = 0.2;
      spec.mechanism = MechanismKind::kContextualGreedy;
      break;
    case Preset::kReplicateExample:
      horizons.clear();
      break;
    case Preset::kAuditBounds:
      seeds = 200, seed = 5;
      if (!spec.epsilon) spec.epsilon = 0.2;
      spec.mechanism = MechanismKind::kContextualGreedy;
      break;
  }
  if (spec.seeds == 0) spec.seeds = seeds;
  if (!spec.seed) spec.seed = seed;
  if (spec.horizons.empty()) spec.horizons = horizons;
  if (spec.output_dir.empty()) spec.output_dir = default_output_dir() / std::string(to_string(spec.preset));
}

std::vector<ConfigIssue> validate_spec(const ExperimentSpec& spec) {
  std::vector<ConfigIssue> issues;
  if (spec.seeds < 1) issues.push_back({"/seeds", 0, "must be at least 1"});
  if (spec.threads < 1) issues.push_back({"/threads", 0, "must be at least 1"});
  for (std::size_t i = 0; i < spec.horizons.size(); ++i) {
    if (spec.horizons[i] == 0) {
      issues.push_back({"/horizons/" + std::to_string(i), 0, "horizons must be positive"});
    }
    if (i > 0 && spec.horizons[i] <= spec.horizons[i - 1]) {
      issues.push_back({"/horizons", 0, "horizons must be strictly increasing"});
      break;
    }
  }
  if (spec.preset == Preset::kScaling && spec.horizons.size() < 3) {
    issues.push_back({"/horizons", 0, "scaling needs at least three horizons"});
  }
  if (spec.epsilon && !(*spec.epsilon > 0.0 && *spec.epsilon <= 1.0)) {
    issues.push_back({"/epsilon", 0, "must lie in (0, 1]"});
  }
  for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
    if (!(spec.alphas[i] > 0.0 && spec.alphas[i] <= 1.0)) {
      issues.push_back({"/alphas/" + std::to_string(i), 0, "must lie in (0, 1]"});
    }
  }
  if (spec.adversary.flip_prob < 0.0 || spec.adversary.flip_prob > 1.0) {
    issues.push_back({"/adversary/flip_prob", 0, "must lie in [0, 1]"});
  }
  return issues;
}

ExperimentSpec parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                                 std::optional<Preset> expected) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"", line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what()}});
  }
  Reader r(text);
  if (!doc.is_object()) {
    r.issue("", "expected a JSON object");
    throw ConfigError(std::move(r.issues()));
  }

  ExperimentSpec spec;
  if (expected) spec.preset = *expected;
  if (!doc.contains("preset")) {
    if (!expected) r.issue("/preset", "missing required field");
  } else if (auto name = r.string(doc["preset"], "/preset")) {
    if (auto preset = parse_preset(*name)) {
      if (expected && *preset != *expected) {
        r.issue("/preset", "config is for \"" + *name + "\" but \"" +
                               std::string(to_string(*expected)) + "\" was requested");
      }
      spec.preset = *preset;
    } else {
      std::string known;
      for (auto n : preset_names()) known += (known.empty() ? "" : ", ") + std::string(n);
      r.issue("/preset", "unknown preset \"" + *name + "\" (" + known + ")");
    }
  }

  for (const auto& [key, value] : doc.items()) {
    const std::string pointer = "/" + key;
    if (!kKnownFields.contains(key)) {
      r.issue(pointer, "unknown field");
    } else if (key == "instance") {
      if (auto path = r.string(value, pointer)) {
        std::filesystem::path p(*path);
        spec.instance_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
    } else if (key == "seed") {
      if (auto v = r.count(value, pointer)) spec.seed = *v;
    } else if (key == "seeds") {
      if (auto v = r.count(value, pointer)) {
        if (*v == 0) r.issue(pointer, "must be at least 1");
        spec.seeds = *v;
      }
    } else if (key == "threads") {
      if (auto v = r.count(value, pointer)) {
        if (*v == 0) r.issue(pointer, "must be at least 1");
        spec.threads = *v;
      }
    } else if (key == "output_dir") {
      if (auto v = r.string(value, pointer)) spec.output_dir = *v;
    } else if (key == "horizons") {
      spec.horizons = read_list<std::size_t>(
          r, value, pointer, [&](const json& n, const std::string& p) { return r.count(n, p); });
      for (std::size_t i = 1; i < spec.horizons.size(); ++i) {
        if (spec.horizons[i] <= spec.horizons[i - 1]) {
          r.issue(pointer, "horizons must be strictly increasing");
          break;
        }
      }
    } else if (key == "corruption") {
      spec.corruption = read_list<std::uint64_t>(
          r, value, pointer, [&](const json& n, const std::string& p) { return r.count(n, p); });
    } else if (key == "alphas") {
      spec.alphas = read_list<double>(
          r, value, pointer, [&](const json& n, const std::string& p) { return r.number(n, p); });
    } else if (key == "epsilon") {
      if (auto v = r.number(value, pointer)) spec.epsilon = *v;
    } else if (key == "epsilon_preset") {
      if (auto name = r.string(value, pointer)) {
        if (auto p = parse_epsilon_preset(*name)) {
          spec.epsilon_preset = *p;
        } else {
          r.issue(pointer, "unknown epsilon preset \"" + *name + "\"");
        }
      }
    } else if (key == "mechanism") {
      if (auto name = r.string(value, pointer)) {
        if (auto kind = parse_mechanism_kind(*name)) {
          spec.mechanism = *kind;
        } else {
          r.issue(pointer, "unknown mechanism \"" + *name + "\"");
        }
      }
    } else if (key == "etc_explore_length") {
      if (auto v = r.count(value, pointer)) spec.etc_explore_length = *v;
    } else if (key == "adversary") {
      read_adversary(r, value, spec.adversary);
    } else if (key == "policies") {
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (auto p = read_policy(r, value[i], pointer + "/" + std::to_string(i))) {
            spec.policies.push_back(*p);
          }
        }
      } else if (auto p = read_policy(r, value, pointer)) {
        spec.policies.push_back(*p);
      }
    } else if (key == "estimator") {
      if (auto name = r.string(value, pointer)) {
        if (*name == "expected") {
          spec.estimator = RegretEstimator::kExpected;
        } else if (*name == "realized") {
          spec.estimator = RegretEstimator::kRealized;
        } else {
          r.issue(pointer, "unknown estimator \"" + *name + "\" (expected, realized)");
        }
      }
    } else if (key == "exact_estimates") {
      if (auto v = r.boolean(value, pointer)) spec.exact_estimates = *v;
    } else if (key == "write_rounds") {
      if (auto v = r.boolean(value, pointer)) spec.write_rounds = *v;
    }
  }

  if (r.issues().empty()) {
    fill_defaults(spec);
    for (auto& issue : validate_spec(spec)) r.issue(issue.field, issue.message);
  }
  if (!r.issues().empty()) throw ConfigError(std::move(r.issues()));
  return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& file, std::optional<Preset> preset) {
  std::ifstream in(file);
  if (!in) throw ConfigError({{"", 0, "cannot open config file " + file.string()}});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), file.parent_path(), preset);
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json doc;
  doc["preset"] = std::string(to_string(spec.preset));
  if (spec.instance_path) doc["instance"] = spec.instance_path->string();
  if (spec.seed) doc["seed"] = *spec.seed;
  doc["seeds"] = spec.seeds;
  doc["threads"] = spec.threads;
  doc["output_dir"] = spec.output_dir.string();
  doc["horizons"] = spec.horizons;
  doc["corruption"] = spec.corruption;
  doc["alphas"] = spec.alphas;
  if (spec.epsilon) doc["epsilon"] = *spec.epsilon;
  if (spec.epsilon_preset) doc["epsilon_preset"] = std::string(to_string(*spec.epsilon_preset));
  doc["mechanism"] = std::string(to_string(spec.mechanism));
  if (spec.etc_explore_length) doc["etc_explore_length"] = *spec.etc_explore_length;
  doc["adversary"] = {{"kind", std::string(to_string(spec.adversary.kind))},
                      {"budget", spec.adversary.budget},
                      {"target", spec.adversary.target},
                      {"flip_prob", spec.adversary.flip_prob}};
  json policies = json::array();
  for (const auto& p : spec.policies) {
    switch (p.kind) {
      case AgentPolicy::Kind::kTruthful:
        policies.push_back("truthful");
        break;
      case AgentPolicy::Kind::kAlphaRational:
        policies.push_back({{"kind", "alpha-rational"}, {"alpha", p.alpha}});
        break;
      case AgentPolicy::Kind::kFixedBid:
        policies.push_back({{"kind", "fixed-bid"}, {"bid", p.fixed_bid}});
        break;
    }
  }
  const bool all_truthful = policies.size() == 1 && policies.front() == "truthful";
  doc["policies"] = policies.empty() || all_truthful ? json("truthful") : policies;
  doc["estimator"] = spec.estimator == RegretEstimator::kExpected ? "expected" : "realized";
  doc["exact_estimates"] = spec.exact_estimates;
  doc["write_rounds"] = spec.write_rounds;
  return doc.dump(2) + "\n";
}

}  // namespace ppcb
