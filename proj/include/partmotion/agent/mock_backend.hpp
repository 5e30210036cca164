#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "partmotion/agent/backend.hpp"
#include "partmotion/annotation/annotation.hpp"

namespace partmotion::agent {

// One keyword rule: it fires when every word of any one of its `match`
// alternatives occurs among the label's tokens, and assigns the listed part
// labels (parts not listed stay UNKNOWN).
struct MockRule {
  std::vector<std::vector<std::string>> match;
  std::array<std::optional<std::string>, annotation::kNumParts> parts;
};

struct RuleTable {
  std::vector<MockRule> rules;

  // First matching rule, or nullptr.
  const MockRule* find(const std::string& label) const;

  static RuleTable fromJson(const nlohmann::json& j);
  static RuleTable load(const std::filesystem::path& path);
};

// Compiled-in copy of data/rules/mock_rules.json.
const RuleTable& defaultRuleTable();

// Deterministic stand-in for an LLM. Reads the request block embedded in the
// prompt and decomposes each action window (or the sequence, if there are no
// actions) with the rule table; windows with no matching rule get UNKNOWN on
// every part. Source labels and boundaries are echoed unchanged.
class MockBackend final : public AgentBackend {
 public:
  explicit MockBackend(RuleTable rules);
  std::string complete(const std::string& prompt) override;
  std::string name() const override {
    return "mock";
  }

 private:
  RuleTable rules_;
};

}  // namespace partmotion::agent
