#include "ppcb/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ppcb {
namespace {

using nlohmann::json;

std::vector<double> numbers(const json& node, const std::string& field) {
  if (!node.is_array()) throw std::invalid_argument(field + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw std::invalid_argument(field + "[" + std::to_string(i) + "]: expected a number");
    }
    out.push_back(node[i].get<double>());
  }
  return out;
}

}  // namespace

InstanceFile parse_instance_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("instance JSON: expected an object");
  for (const char* field : {"context_probs", "ctr", "values"}) {
    if (!doc.contains(field)) throw std::invalid_argument(std::string("missing field: ") + field);
  }

  InstanceFile file;
  AuctionInstance& inst = file.instance;
  inst.context_probs = numbers(doc["context_probs"], "context_probs");
  inst.values = numbers(doc["values"], "values");
  inst.num_contexts = inst.context_probs.size();
  inst.num_agents = inst.values.size();
  inst.horizon = doc.value("horizon", std::size_t{10000});

  const json& ctr = doc["ctr"];
  if (!ctr.is_array() || ctr.size() != inst.num_contexts) {
    throw std::invalid_argument("ctr: expected one row per context");
  }
  inst.ctr = Matrix<double>(inst.num_contexts, inst.num_agents);
  for (std::size_t x = 0; x < ctr.size(); ++x) {
    const auto row = numbers(ctr[x], "ctr[" + std::to_string(x) + "]");
    if (row.size() != inst.num_agents) {
      throw std::invalid_argument("ctr[" + std::to_string(x) + "]: expected one entry per agent");
    }
    for (std::size_t a = 0; a < row.size(); ++a) inst.ctr(x, a) = row[a];
  }

  if (doc.contains("experts")) {
    const json& ex = doc["experts"];
    if (!ex.is_array() || ex.empty()) throw std::invalid_argument("experts: expected rows");
    file.experts.table = Matrix<AgentId>(ex.size(), inst.num_contexts);
    for (std::size_t h = 0; h < ex.size(); ++h) {
      if (!ex[h].is_array() || ex[h].size() != inst.num_contexts) {
        throw std::invalid_argument("experts[" + std::to_string(h) +
                                    "]: expected one agent per context");
      }
      for (std::size_t x = 0; x < inst.num_contexts; ++x) {
        if (!ex[h][x].is_number_unsigned()) {
          throw std::invalid_argument("experts[" + std::to_string(h) + "][" + std::to_string(x) +
                                      "]: expected an agent index");
        }
        file.experts.table(h, x) = ex[h][x].get<AgentId>();
      }
    }
  } else {
    file.experts = constant_experts(inst.num_agents, inst.num_contexts);
  }

  require_valid(file.instance, file.experts);
  return file;
}

InstanceFile load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance_json(buf.str());
}

std::string instance_to_json(const AuctionInstance& instance, const ExpertClass& experts) {
  json doc;
  doc["context_probs"] = instance.context_probs;
  doc["values"] = instance.values;
  doc["horizon"] = instance.horizon;
  json ctr = json::array();
  for (std::size_t x = 0; x < instance.num_contexts; ++x) {
    const auto row = instance.ctr.row(x);
    ctr.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["ctr"] = ctr;
  json ex = json::array();
  for (std::size_t h = 0; h < experts.num_experts(); ++h) {
    const auto row = experts.table.row(h);
    ex.push_back(std::vector<AgentId>(row.begin(), row.end()));
  }
  doc["experts"] = ex;
  return doc.dump(2) + "\n";
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_round_csv(std::ostream& out, const RunLog& log) {
  out << "round,context,explore,arm,click,corrupted,payment";
  for (std::size_t a = 0; a < log.num_agents; ++a) out << ",bid_" << a;
  out << ",cum_regret_realized,cum_regret_expected\n";
  const bool curves = log.regret_realized.size() == log.rounds.size();
  for (std::size_t i = 0; i < log.rounds.size(); ++i) {
    const auto& r = log.rounds[i];
    out << r.round << ',' << r.context << ',' << (r.explore ? 1 : 0) << ',' << r.arm << ','
        << r.click << ',' << (r.corrupted ? 1 : 0) << ',' << format_number(r.payment);
    for (double b : r.bids) out << ',' << format_number(b);
    if (curves) {
      out << ',' << format_number(log.regret_realized[i]) << ','
          << format_number(log.regret_expected[i]);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<RunLog>& logs) {
  out << "seed,horizon,mechanism,epsilon,final_regret_realized,final_regret_expected,"
         "welfare_realized,welfare_expected,welfare_uncorrupted,explore_rounds,corrupted_rounds,"
         "deviation_rounds,payment_violations\n";
  for (const auto& log : logs) {
    out << log.seed << ',' << log.horizon << ',' << to_string(log.mechanism) << ','
        << format_number(log.epsilon) << ','
        << format_number(log.final_regret(RegretEstimator::kRealized)) << ','
        << format_number(log.final_regret(RegretEstimator::kExpected)) << ','
        << format_number(log.welfare_realized) << ',' << format_number(log.welfare_expected) << ','
        << format_number(log.welfare_uncorrupted) << ',' << log.audit.explore_rounds << ','
        << log.audit.corrupted_rounds << ',' << log.audit.deviation_rounds << ','
        << log.audit.payment_violations << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ppcb
