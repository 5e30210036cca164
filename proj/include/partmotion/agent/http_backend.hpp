#pragma once

#include <string>

#include "partmotion/agent/backend.hpp"

namespace partmotion::agent {

// Chat-completions client for OpenAI-compatible endpoints. POSTs
// {endpoint}/chat/completions with temperature 0 and returns the first
// choice's message content. The bearer token comes from the environment
// variable FRANKEN_AGENT_API_KEY.
class HttpBackend final : public AgentBackend {
 public:
  explicit HttpBackend(const BackendConfig& config);
  std::string complete(const std::string& prompt) override;
  std::string name() const override {
    return "http:" + model_;
  }

 private:
  std::string scheme_host_;
  std::string path_prefix_;
  std::string model_;
  std::string apiKey_;
  double timeoutSeconds_;
};

}  // namespace partmotion::agent
