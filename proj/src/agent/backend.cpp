#include "partmotion/agent/backend.hpp"

#include <algorithm>
#include <thread>

#include "partmotion/agent/mock_backend.hpp"
#include "partmotion/common/error.hpp"
#ifdef PARTMOTION_HAVE_HTTP
#include "partmotion/agent/http_backend.hpp"
#endif

namespace partmotion::agent {

RateLimiter::RateLimiter(double requestsPerMinute, double burst)
    : perSecond_(requestsPerMinute / 60.0), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (unlimited()) {
    return;
  }
  for (;;) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mutex_);
      const auto now = Clock::now();
      tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * perSecond_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / perSecond_);
    }
    std::this_thread::sleep_for(wait);
  }
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {
  if (responses_.empty()) {
    throw Error(ErrorCode::kConfig, "scripted backend needs at least one response");
  }
}

std::string ScriptedBackend::complete(const std::string&) {
  std::lock_guard lock(mutex_);
  const std::size_t i = std::min(calls_, responses_.size() - 1);
  ++calls_;
  return responses_[i];
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::unique_ptr<AgentBackend> makeBackend(const BackendConfig& config) {
  if (config.kind == "mock") {
    return std::make_unique<MockBackend>(config.rulesPath.empty() ? defaultRuleTable()
                                                                  : RuleTable::load(config.rulesPath));
  }
  if (config.kind == "garbage") {
    return std::make_unique<ScriptedBackend>(std::vector<std::string>{"I am not able to produce JSON today."});
  }
  if (config.kind == "http") {
#ifdef PARTMOTION_HAVE_HTTP
    return std::make_unique<HttpBackend>(config);
#else
    throw Error(ErrorCode::kConfig, "this build has no HTTP backend (configure with PARTMOTION_ENABLE_HTTP=ON)");
#endif
  }
  throw Error(ErrorCode::kConfig, "unknown agent backend '" + config.kind + "' (mock, http, garbage)");
}

}  // namespace partmotion::agent
