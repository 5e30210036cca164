#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "partmotion/agent/backend.hpp"
#include "partmotion/agent/prompt.hpp"
#include "partmotion/annotation/annotation.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::agent {

// Appends one JSON line per backend attempt. Thread-safe.
class TranscriptLog {
 public:
  TranscriptLog() = default;  // discards entries
  explicit TranscriptLog(const std::filesystem::path& path);

  void record(const std::string& requestId, int attempt, const std::string& prompt, const std::string& raw,
              const std::string& status, const std::string& error);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

struct AnnotatorConfig {
  int maxAttempts = 3;
  std::size_t parallelism = 1;
  std::string promptTemplate;  // empty: the compiled-in default
};

// Wraps a backend with prompting, strict parsing and a retry loop. On each
// failed attempt the next prompt repeats the original with the suffix
// "previous output was invalid because <reason>". Refined source labels are
// accepted but their boundaries must match the request.
class Annotator {
 public:
  Annotator(AgentBackend& backend, AnnotatorConfig config, RateLimiter* limiter = nullptr,
            TranscriptLog* transcript = nullptr);

  // Throws Error(kExhaustedRetries) carrying the last failure, or
  // Error(kAgentUnavailable) from the transport.
  annotation::HierarchicalAnnotation annotate(const AgentRequest& request);

  struct Outcome {
    std::optional<annotation::HierarchicalAnnotation> annotation;
    std::optional<Error> error;
  };
  // Annotates independent requests on up to config.parallelism threads.
  // Results keep the input order.
  std::vector<Outcome> annotateBatch(const std::vector<AgentRequest>& requests);

 private:
  AgentBackend& backend_;
  AnnotatorConfig config_;
  RateLimiter* limiter_;
  TranscriptLog* transcript_;
};

}  // namespace partmotion::agent
