#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace partmotion::agent {

struct BackendConfig {
  std::string kind = "mock";  // mock | http | garbage
  std::string endpoint;       // base URL for http, e.g. https://host/v1
  std::string model;
  double timeoutSeconds = 60.0;
  int maxAttempts = 3;
  double requestsPerMinute = 30.0;  // <= 0 disables limiting
  std::string rulesPath;            // mock rule table override
};

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  // Returns the raw completion. Transport failures throw Error(kAgentUnavailable).
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

// Token bucket shared by concurrent callers of one backend.
class RateLimiter {
 public:
  explicit RateLimiter(double requestsPerMinute, double burst = 1.0);

  // Blocks until a token is available.
  void acquire();
  bool unlimited() const {
    return perSecond_ <= 0.0;
  }

 private:
  using Clock = std::chrono::steady_clock;
  double perSecond_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

// Replays fixed responses in order, repeating the last one; for tests and
// for exercising the retry path ("garbage" backend).
class ScriptedBackend final : public AgentBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses);
  std::string complete(const std::string& prompt) override;
  std::string name() const override {
    return "scripted";
  }
  std::size_t calls() const;

 private:
  std::vector<std::string> responses_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

// Builds the backend named by config.kind. "http" requires a build with
// PARTMOTION_HAVE_HTTP and reads the key from FRANKEN_AGENT_API_KEY.
std::unique_ptr<AgentBackend> makeBackend(const BackendConfig& config);

}  // namespace partmotion::agent
