#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "partmotion/annotation/annotation.hpp"

namespace partmotion::agent {

// Source annotations for one sequence, handed to the agent for part-level
// decomposition.
struct AgentRequest {
  std::string id;
  int numFrames = 0;
  double fps = 20.0;
  annotation::Track sequence;
  annotation::Track actions;

  nlohmann::json toJson() const;
  static AgentRequest fromJson(const nlohmann::json& j);
};

AgentRequest requestFromAnnotation(const annotation::HierarchicalAnnotation& ann);

// Marker preceding the machine-readable copy of the request in every prompt.
inline constexpr const char* kRequestMarker = "REQUEST_JSON:";

// Description of the response object, substituted for {schema}.
std::string responseSchemaText();

// Substitutes {duration}, {fps}, {parts}, {sequence}, {actions} and {schema},
// then appends the request JSON after kRequestMarker. Throws Error(kTemplate)
// naming the first missing placeholder, or when the template does not
// instruct the model to answer "unknown" under uncertainty.
std::string buildDecompositionPrompt(const AgentRequest& req, const std::string& templateText);

std::string loadPromptTemplate(const std::filesystem::path& path);

// Template shipped in data/prompts/decompose.txt, compiled in for installs
// without the data directory.
const std::string& defaultPromptTemplate();

}  // namespace partmotion::agent
