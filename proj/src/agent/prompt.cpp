#include "partmotion/agent/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "partmotion/annotation/io.hpp"
#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/embedded_data.hpp"

namespace partmotion::agent {
namespace {

constexpr const char* kPlaceholders[] = {"{duration}", "{fps}", "{parts}", "{sequence}", "{actions}", "{schema}"};

void replaceAll(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string describeTrack(const annotation::Track& track) {
  if (track.empty()) {
    return "  (none)\n";
  }
  std::ostringstream os;
  for (const auto& seg : track) {
    os << "  [" << seg.start << ", " << seg.end << "): " << seg.label.wire() << "\n";
  }
  return os.str();
}

std::string formatFps(double fps) {
  std::ostringstream os;
  os << fps;
  return os.str();
}

}  // namespace

nlohmann::json AgentRequest::toJson() const {
  nlohmann::json parts = nlohmann::json::array();
  for (auto p : annotation::kAllParts) {
    parts.push_back(std::string(annotation::partKey(p)));
  }
  return {{"id", id},
          {"num_frames", numFrames},
          {"fps", fps},
          {"parts", parts},
          {"sequence", annotation::trackToJson(sequence)},
          {"actions", annotation::trackToJson(actions)}};
}

AgentRequest AgentRequest::fromJson(const nlohmann::json& j) {
  try {
    AgentRequest r;
    r.id = j.value("id", "");
    r.numFrames = j.at("num_frames").get<int>();
    r.fps = j.at("fps").get<double>();
    r.sequence = annotation::trackFromJson(j.value("sequence", nlohmann::json::array()), "sequence");
    r.actions = annotation::trackFromJson(j.value("actions", nlohmann::json::array()), "actions");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("agent request: ") + e.what());
  }
}

AgentRequest requestFromAnnotation(const annotation::HierarchicalAnnotation& ann) {
  return {ann.id, ann.numFrames, ann.fps, ann.sequence, ann.actions};
}

std::string responseSchemaText() {
  return R"({
  "sequence": [{"label": string, "start": int, "end": int}],
  "actions":  [{"label": string, "start": int, "end": int}, ...],
  "parts": {
    "head": [...], "left_arm": [...], "right_arm": [...], "spine": [...],
    "left_leg": [...], "right_leg": [...], "trajectory": [...]
  }
}
Every list holds segments {"label", "start", "end"} with integer frames;
use "unknown" as the label when uncertain.)";
}

std::string buildDecompositionPrompt(const AgentRequest& req, const std::string& templateText) {
  for (const char* ph : kPlaceholders) {
    if (templateText.find(ph) == std::string::npos) {
      throw Error(ErrorCode::kTemplate, std::string("prompt template is missing placeholder ") + ph, ph);
    }
  }
  std::string lowered = templateText;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered.find("unknown") == std::string::npos) {
    throw Error(ErrorCode::kTemplate, "prompt template must instruct the model to answer unknown when uncertain");
  }
  std::string parts;
  for (auto p : annotation::kAllParts) {
    parts += (parts.empty() ? "" : ", ") + std::string(annotation::partKey(p));
  }
  std::string out = templateText;
  replaceAll(out, "{duration}", std::to_string(req.numFrames));
  replaceAll(out, "{fps}", formatFps(req.fps));
  replaceAll(out, "{parts}", parts);
  replaceAll(out, "{sequence}", describeTrack(req.sequence));
  replaceAll(out, "{actions}", describeTrack(req.actions));
  replaceAll(out, "{schema}", responseSchemaText());
  if (!out.empty() && out.back() != '\n') {
    out += '\n';
  }
  out += std::string("\n") + kRequestMarker + "\n" + req.toJson().dump() + "\n";
  return out;
}

std::string loadPromptTemplate(const std::filesystem::path& path) {
  return readTextFile(path);
}

const std::string& defaultPromptTemplate() {
  static const std::string text = embedded::kPromptTemplate;
  return text;
}

}  // namespace partmotion::agent
