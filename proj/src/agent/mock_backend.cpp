#include "partmotion/agent/mock_backend.hpp"

#include <algorithm>

#include "partmotion/agent/prompt.hpp"
#include "partmotion/annotation/io.hpp"
#include "partmotion/annotation/stats.hpp"
#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/embedded_data.hpp"

namespace partmotion::agent {

const MockRule* RuleTable::find(const std::string& label) const {
  const auto tokens = annotation::tokenize(label);
  auto has = [&](const std::string& w) { return std::find(tokens.begin(), tokens.end(), w) != tokens.end(); };
  for (const auto& rule : rules) {
    for (const auto& alt : rule.match) {
      if (!alt.empty() && std::all_of(alt.begin(), alt.end(), has)) {
        return &rule;
      }
    }
  }
  return nullptr;
}

RuleTable RuleTable::fromJson(const nlohmann::json& j) {
  try {
    RuleTable table;
    for (const auto& r : j.at("rules")) {
      MockRule rule;
      rule.match = r.at("match").get<std::vector<std::vector<std::string>>>();
      for (const auto& [key, value] : r.at("parts").items()) {
        const auto part = annotation::parsePart(key);
        if (!part) {
          throw Error(ErrorCode::kFormat, "rule table: unknown part '" + key + "'");
        }
        rule.parts[annotation::index(*part)] = value.get<std::string>();
      }
      table.rules.push_back(std::move(rule));
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("rule table: ") + e.what());
  }
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
  try {
    return fromJson(nlohmann::json::parse(readTextFile(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, e.what(), path.string());
  }
}

const RuleTable& defaultRuleTable() {
  static const RuleTable table = RuleTable::fromJson(nlohmann::json::parse(embedded::kMockRules));
  return table;
}

MockBackend::MockBackend(RuleTable rules) : rules_(std::move(rules)) {}

std::string MockBackend::complete(const std::string& prompt) {
  const auto pos = prompt.rfind(kRequestMarker);
  if (pos == std::string::npos) {
    return "The prompt carried no request block.";
  }
  const auto j = nlohmann::json::parse(prompt.substr(pos + std::string(kRequestMarker).size()), nullptr, false);
  if (j.is_discarded()) {
    return "The request block was not valid JSON.";
  }
  const AgentRequest req = AgentRequest::fromJson(j);

  annotation::Track windows = req.actions;
  if (windows.empty()) {
    for (const auto& s : req.sequence) {
      windows.push_back(s);
    }
  }
  nlohmann::json parts = nlohmann::json::object();
  for (auto p : annotation::kAllParts) {
    parts[std::string(annotation::partKey(p))] = nlohmann::json::array();
  }
  for (const auto& w : windows) {
    const MockRule* rule = w.label.isUnknown() ? nullptr : rules_.find(w.label.text());
    for (auto p : annotation::kAllParts) {
      std::string label = "unknown";
      if (rule != nullptr && rule->parts[annotation::index(p)]) {
        label = *rule->parts[annotation::index(p)];
      }
      parts[std::string(annotation::partKey(p))].push_back({{"label", label}, {"start", w.start}, {"end", w.end}});
    }
  }
  const nlohmann::json response = {
      {"sequence", annotation::trackToJson(req.sequence)},
      {"actions", annotation::trackToJson(req.actions)},
      {"parts", parts},
  };
  return response.dump();
}

}  // namespace partmotion::agent
