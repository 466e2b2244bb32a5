#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>
#include <sstream>

#include "ppcb/config.hpp"
#include "ppcb/experiments.hpp"
#include "ppcb/io.hpp"

namespace ppcb {
namespace {

const char* kInstance = R"({
  "context_probs": [0.25, 0.75],
  "ctr": [[0.5, 0.1], [0.2, 0.9]],
  "values": [0.4, 0.8],
  "horizon": 500,
  "experts": [[0, 1], [1, 0]]
})";

TEST(InstanceJson, Parses) {
  const InstanceFile f = parse_instance_json(kInstance);
  EXPECT_EQ(f.instance.num_agents, 2u);
  EXPECT_EQ(f.instance.num_contexts, 2u);
  EXPECT_EQ(f.instance.horizon, 500u);
  EXPECT_EQ(f.instance.ctr(1, 1), 0.9);
  EXPECT_EQ(f.experts.recommend(1, 0), 1u);
}

TEST(InstanceJson, DefaultsToConstantExperts) {
  const InstanceFile f =
      parse_instance_json(R"({"context_probs": [1], "ctr": [[0.3, 0.6, 0.9]], "values": [1, 1, 1]})");
  EXPECT_EQ(f.instance.horizon, 10000u);
  ASSERT_EQ(f.experts.num_experts(), 3u);
  for (ExpertId h = 0; h < 3; ++h) EXPECT_EQ(f.experts.recommend(h, 0), h);
}

TEST(InstanceJson, RoundTrips) {
  const auto inst = example_instance(1234);
  const auto experts = example_experts();
  const InstanceFile back = parse_instance_json(instance_to_json(inst, experts));
  EXPECT_EQ(back.instance.context_probs, inst.context_probs);
  EXPECT_EQ(back.instance.values, inst.values);
  EXPECT_EQ(back.instance.horizon, 1234u);
  EXPECT_EQ(back.experts.table, experts.table);
  EXPECT_EQ(exact_pi_table(back.instance, back.experts), exact_pi_table(inst, experts));
}

TEST(InstanceJson, ReportsProblems) {
  EXPECT_THROW(parse_instance_json("{"), std::invalid_argument);
  EXPECT_THROW(parse_instance_json(R"({"ctr": [[0.5]], "values": [1]})"), std::invalid_argument);
  // Probabilities must sum to one.
  EXPECT_THROW(parse_instance_json(R"({"context_probs": [0.5], "ctr": [[0.5]], "values": [1]})"),
               std::invalid_argument);
  // CTR outside [0, 1].
  EXPECT_THROW(parse_instance_json(R"({"context_probs": [1], "ctr": [[1.5]], "values": [1]})"),
               std::invalid_argument);
  // Expert recommending a missing agent.
  EXPECT_THROW(parse_instance_json(
                   R"({"context_probs": [1], "ctr": [[0.5]], "values": [1], "experts": [[3]]})"),
               std::invalid_argument);
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), std::exception);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(0.0), "0");
  for (double v : {1.0 / 3.0, 2.0 / 3.0 * 1e-7, 123456.789, std::numeric_limits<double>::min()}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(RoundCsv, Columns) {
  RunConfig config = basic_config(example_instance(), example_experts(),
                                  {MechanismKind::kContextualGreedy, 0.2, 0}, 20, 1);
  const RunLog log = run(config);
  std::ostringstream out;
  write_round_csv(out, log);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "round,context,explore,arm,click,corrupted,payment,bid_0,bid_1,bid_2,"
            "cum_regret_realized,cum_regret_expected");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
  }
  EXPECT_EQ(rows, 20u);

  std::ostringstream summary;
  write_summary_csv(summary, {log, log});
  std::istringstream sin(summary.str());
  rows = 0;
  while (std::getline(sin, line)) ++rows;
  EXPECT_EQ(rows, 3u);
}

ConfigIssue first_issue(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    EXPECT_FALSE(e.issues().empty());
    return e.issues().front();
  }
  ADD_FAILURE() << "config parsed: " << text;
  return {};
}

TEST(Config, MinimalSimulate) {
  ExperimentSpec spec = parse_config_text(R"({"preset": "simulate"})");
  EXPECT_EQ(spec.preset, Preset::kSimulate);
  fill_defaults(spec);
  EXPECT_EQ(spec.seeds, 1u);
  EXPECT_EQ(spec.seed, 0u);
  EXPECT_EQ(spec.horizons, std::vector<std::size_t>{10000});
  EXPECT_TRUE(validate_spec(spec).empty());
}

TEST(Config, PresetDefaults) {
  ExperimentSpec spec = parse_config_text(R"({"preset": "scaling"})");
  fill_defaults(spec);
  EXPECT_EQ(spec.seeds, 50u);
  EXPECT_EQ(spec.horizons.size(), 3u);
  EXPECT_EQ(spec.mechanism, MechanismKind::kStochasticGreedy);

  spec = parse_config_text(R"({"preset": "truthfulness-audit", "seeds": 7})");
  fill_defaults(spec);
  EXPECT_EQ(spec.seeds, 7u);
  EXPECT_EQ(spec.alphas, std::vector<double>{0.05});
  EXPECT_EQ(spec.epsilon, 0.2);
}

TEST(Config, FullSchema) {
  const ExperimentSpec spec = parse_config_text(R"({
    "preset": "simulate",
    "seed": 9, "seeds": 3, "threads": 2, "output_dir": "out",
    "horizons": [100, 200],
    "epsilon": 0.3,
    "mechanism": "explore-then-commit",
    "etc_explore_length": 40,
    "adversary": {"kind": "boost-own", "budget": 12, "target": 1},
    "policies": ["truthful", {"kind": "alpha-rational", "alpha": 0.1}, {"kind": "fixed-bid", "bid": 0.4}],
    "estimator": "realized",
    "write_rounds": false
  })");
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_EQ(spec.threads, 2u);
  EXPECT_EQ(spec.mechanism, MechanismKind::kExploreThenCommit);
  EXPECT_EQ(spec.etc_explore_length, 40u);
  EXPECT_EQ(spec.adversary.kind, AdversaryKind::kBoostOwn);
  EXPECT_EQ(spec.adversary.budget, 12u);
  ASSERT_EQ(spec.policies.size(), 3u);
  EXPECT_EQ(spec.estimator, RegretEstimator::kRealized);
  EXPECT_FALSE(spec.write_rounds);
}

TEST(Config, RepeatedHorizonsRejected) {
  const ConfigIssue issue = first_issue(R"({"preset": "scaling", "horizons": [10000, 10000]})");
  EXPECT_EQ(issue.field.rfind("/horizons", 0), 0u);
  EXPECT_NE(issue.message.find("strictly increasing"), std::string::npos);
}

TEST(Config, UnknownValuesNameTheField) {
  ConfigIssue issue = first_issue("{\n  \"preset\": \"simulate\",\n  \"mechanism\": \"vcg\"\n}");
  EXPECT_EQ(issue.field, "/mechanism");
  EXPECT_EQ(issue.line, 3u);
  EXPECT_NE(issue.message.find("vcg"), std::string::npos);

  issue = first_issue(R"({"preset": "nope"})");
  EXPECT_EQ(issue.field, "/preset");

  issue = first_issue("{\"preset\": \"simulate\",\n\"adversary\": {\"kind\": \"evil\"}}");
  EXPECT_EQ(issue.field, "/adversary/kind");
  EXPECT_EQ(issue.line, 2u);

  issue = first_issue(R"({"preset": "simulate", "colour": 1})");
  EXPECT_EQ(issue.field, "/colour");

  issue = first_issue(R"({"preset": "simulate", "policies": [{"kind": "alpha-rational"}]})");
  EXPECT_EQ(issue.field.rfind("/policies/0", 0), 0u);
}

TEST(Config, RejectsBadNumbers) {
  EXPECT_EQ(first_issue(R"({"preset": "simulate", "seeds": 0})").field, "/seeds");
  EXPECT_EQ(first_issue(R"({"preset": "simulate", "epsilon": 1.5})").field, "/epsilon");
  EXPECT_EQ(first_issue(R"({"preset": "simulate", "seed": -1})").field, "/seed");
  EXPECT_EQ(first_issue(R"({"preset": "truthfulness-audit", "alphas": [0]})").field, "/alphas/0");
  EXPECT_EQ(first_issue(R"({"preset": "scaling", "horizons": [100, 1000]})").field, "/horizons");
  EXPECT_EQ(first_issue("{\n\"preset\": \"simulate\",\n}").line, 3u);
  EXPECT_EQ(first_issue(R"({})").field, "/preset");
}

TEST(Config, ExpectedPreset) {
  EXPECT_EQ(parse_config_text("{}", {}, Preset::kScaling).preset, Preset::kScaling);
  EXPECT_THROW(parse_config_text(R"({"preset": "simulate"})", {}, Preset::kScaling), ConfigError);
}

TEST(Config, InstancePathIsRelativeToConfig) {
  const ExperimentSpec spec =
      parse_config_text(R"({"preset": "simulate", "instance": "inst.json"})", "/data/configs");
  ASSERT_TRUE(spec.instance_path);
  EXPECT_EQ(*spec.instance_path, std::filesystem::path("/data/configs/inst.json"));
}

TEST(Config, DryRunJsonParsesBack) {
  ExperimentSpec spec = parse_config_text(
      R"({"preset": "corruption-sweep", "corruption": [0, 50], "adversary": {"kind": "random-flip", "flip_prob": 0.25}})");
  fill_defaults(spec);
  const std::string json = spec_to_json(spec);
  ExperimentSpec back = parse_config_text(json);
  fill_defaults(back);
  EXPECT_EQ(spec_to_json(back), json);
  EXPECT_EQ(back.corruption, (std::vector<std::uint64_t>{0, 50}));
  EXPECT_EQ(back.adversary.flip_prob, 0.25);
}

TEST(Config, OutputDirFromEnvironment) {
  ::setenv("PPCB_OUTPUT_DIR", "/tmp/ppcb-env", 1);
  EXPECT_EQ(default_output_dir(), std::filesystem::path("/tmp/ppcb-env"));
  ExperimentSpec spec;
  spec.preset = Preset::kAuditBounds;
  fill_defaults(spec);
  EXPECT_EQ(spec.output_dir, std::filesystem::path("/tmp/ppcb-env/audit-bounds"));
  ::unsetenv("PPCB_OUTPUT_DIR");
  EXPECT_EQ(default_output_dir(), std::filesystem::path("ppcb-out"));
}

TEST(Config, PresetNames) {
  for (auto name : preset_names()) {
    const auto p = parse_preset(name);
    ASSERT_TRUE(p);
    EXPECT_EQ(to_string(*p), name);
  }
  EXPECT_EQ(preset_names().size(), 6u);
}

}  // namespace
}  // namespace ppcb
