#include "partmotion/agent/annotator.hpp"

#include <atomic>
#include <thread>

#include <json.hpp>

#include "partmotion/agent/response.hpp"

namespace partmotion::agent {
namespace {

std::string describe(const Error& e) {
  std::string s = std::string(e.what());
  if (!e.detail().empty()) {
    s += " (" + e.detail().substr(0, 160) + ")";
  }
  return s;
}

// Boundaries of a gap-filled source track.
std::vector<std::pair<int, int>> bounds(const annotation::Track& track, int numFrames) {
  std::vector<std::pair<int, int>> out;
  for (const auto& s : annotation::fillTrackGaps(track, numFrames)) {
    out.emplace_back(s.start, s.end);
  }
  return out;
}

}  // namespace

TranscriptLog::TranscriptLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) {
    throw Error(ErrorCode::kIo, "cannot open transcript log", path.string());
  }
}

void TranscriptLog::record(const std::string& requestId, int attempt, const std::string& prompt,
                           const std::string& raw, const std::string& status, const std::string& error) {
  std::lock_guard lock(mutex_);
  if (!out_.is_open()) {
    return;
  }
  const nlohmann::json line = {{"request_id", requestId}, {"attempt", attempt}, {"prompt", prompt},
                               {"raw_response", raw},     {"status", status},   {"error", error}};
  out_ << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  out_.flush();
}

Annotator::Annotator(AgentBackend& backend, AnnotatorConfig config, RateLimiter* limiter, TranscriptLog* transcript)
    : backend_(backend), config_(std::move(config)), limiter_(limiter), transcript_(transcript) {
  if (config_.maxAttempts < 1) {
    throw Error(ErrorCode::kConfig, "max attempts must be at least 1");
  }
  if (config_.promptTemplate.empty()) {
    config_.promptTemplate = defaultPromptTemplate();
  }
}

annotation::HierarchicalAnnotation Annotator::annotate(const AgentRequest& request) {
  if (request.numFrames <= 0 || request.fps <= 0.0) {
    throw Error(ErrorCode::kInvalidAnnotation, "request needs positive duration and fps", request.id);
  }
  const std::string basePrompt = buildDecompositionPrompt(request, config_.promptTemplate);
  const auto sourceActions = bounds(request.actions, request.numFrames);
  std::string prompt = basePrompt;
  std::string lastFailure;
  for (int attempt = 1; attempt <= config_.maxAttempts; ++attempt) {
    if (limiter_ != nullptr) {
      limiter_->acquire();
    }
    const std::string raw = backend_.complete(prompt);
    try {
      const AgentResponse response = parseAgentResponse(raw, request.numFrames, request.fps);
      auto ann = responseToAnnotation(response, request.id, request.numFrames, request.fps);
      if (bounds(ann.actions, request.numFrames) != sourceActions) {
        throw Error(ErrorCode::kSchemaViolation, "action boundaries differ from the source annotation");
      }
      if (transcript_ != nullptr) {
        transcript_->record(request.id, attempt, prompt, raw, "ok", "");
      }
      return ann;
    } catch (const Error& e) {
      lastFailure = std::string(errorCodeName(e.code())) + ": " + describe(e);
      if (transcript_ != nullptr) {
        transcript_->record(request.id, attempt, prompt, raw, "invalid", lastFailure);
      }
      prompt = basePrompt + "\nprevious output was invalid because " + lastFailure + "\n";
    }
  }
  throw Error(ErrorCode::kExhaustedRetries,
              "no valid response after " + std::to_string(config_.maxAttempts) + " attempts for '" + request.id + "'",
              lastFailure);
}

std::vector<Annotator::Outcome> Annotator::annotateBatch(const std::vector<AgentRequest>& requests) {
  std::vector<Outcome> outcomes(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        outcomes[i].annotation = annotate(requests[i]);
      } catch (const Error& e) {
        outcomes[i].error = e;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config_.parallelism, requests.size()));
  if (threads == 1) {
    worker();
    return outcomes;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  return outcomes;
}

}  // namespace partmotion::agent
