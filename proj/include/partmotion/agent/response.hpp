#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "partmotion/annotation/annotation.hpp"

namespace partmotion::agent {

struct AgentResponse {
  annotation::Track sequence;
  annotation::Track actions;
  std::array<annotation::Track, annotation::kNumParts> parts;
};

// The first balanced {...} object in the text, skipping braces inside JSON
// strings; nullopt if none closes.
std::optional<std::string> extractJsonObject(std::string_view text);

// Parses and checks a raw model reply. If the whole reply is not JSON, one
// brace-matched extraction is attempted. Out-of-range times are rejected, not
// clamped. Errors (each carrying the offending fragment): kMalformedJson,
// kSchemaViolation, kTimeOutOfRange, kOverlap.
AgentResponse parseAgentResponse(std::string_view raw, int numFrames, double fps);

// Gap-filled, validated annotation built from a response.
annotation::HierarchicalAnnotation responseToAnnotation(const AgentResponse& response, const std::string& id,
                                                        int numFrames, double fps);

}  // namespace partmotion::agent
