#include "partmotion/agent/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "partmotion/common/error.hpp"

namespace partmotion::agent {

HttpBackend::HttpBackend(const BackendConfig& config) : model_(config.model), timeoutSeconds_(config.timeoutSeconds) {
  if (config.endpoint.empty() || config.model.empty()) {
    throw Error(ErrorCode::kConfig, "http backend needs an endpoint and a model name");
  }
  const char* key = std::getenv("FRANKEN_AGENT_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::kConfig, "FRANKEN_AGENT_API_KEY is not set");
  }
  apiKey_ = key;
  // Split "https://host[:port]/prefix" into the client base and path prefix.
  const auto schemeEnd = config.endpoint.find("://");
  const auto pathStart = config.endpoint.find('/', schemeEnd == std::string::npos ? 0 : schemeEnd + 3);
  scheme_host_ = config.endpoint.substr(0, pathStart);
  path_prefix_ = pathStart == std::string::npos ? "" : config.endpoint.substr(pathStart);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

std::string HttpBackend::complete(const std::string& prompt) {
  httplib::Client client(scheme_host_);
  const auto secs = static_cast<time_t>(timeoutSeconds_);
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);
  client.set_bearer_token_auth(apiKey_);
  const nlohmann::json body = {
      {"model", model_},
      {"temperature", 0},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kAgentUnavailable, "request failed: " + httplib::to_string(res.error()), scheme_host_);
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kAgentUnavailable, "endpoint returned HTTP " + std::to_string(res->status),
                res->body.substr(0, 200));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
    throw Error(ErrorCode::kAgentUnavailable, "unexpected completion payload", res->body.substr(0, 200));
  }
  const auto& message = reply["choices"][0].value("message", nlohmann::json::object());
  return message.value("content", "");
}

}  // namespace partmotion::agent
