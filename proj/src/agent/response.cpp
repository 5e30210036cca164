#include "partmotion/agent/response.hpp"

#include <algorithm>

#include <json.hpp>

#include "partmotion/common/error.hpp"

namespace partmotion::agent {
namespace {

using annotation::Label;
using annotation::TimedLabel;
using annotation::Track;

std::string fragment(const nlohmann::json& j) {
  std::string s = j.dump();
  return s.size() > 200 ? s.substr(0, 200) + "..." : s;
}

Track parseTrack(const nlohmann::json& j, const std::string& name, int numFrames) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kSchemaViolation, name + " must be an array of segments", fragment(j));
  }
  Track track;
  for (const auto& seg : j) {
    if (!seg.is_object() || !seg.contains("label") || !seg.contains("start") || !seg.contains("end")) {
      throw Error(ErrorCode::kSchemaViolation, name + ": segment needs label, start and end", fragment(seg));
    }
    const auto& label = seg.at("label");
    if (!(label.is_string() || label.is_null()) || !seg.at("start").is_number_integer() ||
        !seg.at("end").is_number_integer()) {
      throw Error(ErrorCode::kSchemaViolation, name + ": label must be a string and times integers", fragment(seg));
    }
    for (const auto& [key, value] : seg.items()) {
      if (key != "label" && key != "start" && key != "end") {
        throw Error(ErrorCode::kSchemaViolation, name + ": unexpected segment key '" + key + "'", fragment(seg));
      }
    }
    const int start = seg.at("start").get<int>();
    const int end = seg.at("end").get<int>();
    if (start < 0 || end > numFrames || start >= end) {
      throw Error(ErrorCode::kTimeOutOfRange,
                  name + ": segment [" + std::to_string(start) + ", " + std::to_string(end) + ") outside [0, " +
                      std::to_string(numFrames) + ")",
                  fragment(seg));
    }
    Label l = Label::unknown();
    if (label.is_string()) {
      const std::string text = label.get<std::string>();
      const auto first = text.find_first_not_of(" \t\r\n");
      if (first != std::string::npos) {
        const auto last = text.find_last_not_of(" \t\r\n");
        l = Label::fromWire(text.substr(first, last - first + 1));
      }
    }
    track.push_back({std::move(l), start, end});
  }
  std::stable_sort(track.begin(), track.end(), [](const TimedLabel& a, const TimedLabel& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < track.size(); ++i) {
    if (track[i].start < track[i - 1].end) {
      throw Error(ErrorCode::kOverlap, name + ": segments " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap",
                  fragment(j));
    }
  }
  return track;
}

}  // namespace

std::optional<std::string> extractJsonObject(std::string_view text) {
  const auto open = text.find('{');
  if (open == std::string_view::npos) {
    return std::nullopt;
  }
  int depth = 0;
  bool inString = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (inString) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        inString = false;
      }
      continue;
    }
    if (c == '"') {
      inString = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        return std::string(text.substr(open, i - open + 1));
      }
    }
  }
  return std::nullopt;
}

AgentResponse parseAgentResponse(std::string_view raw, int numFrames, double fps) {
  if (numFrames <= 0 || fps <= 0.0) {
    throw Error(ErrorCode::kConfig, "response parsing needs positive duration and fps");
  }
  nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
  if (j.is_discarded()) {
    const auto extracted = extractJsonObject(raw);
    if (extracted) {
      j = nlohmann::json::parse(*extracted, nullptr, false);
    }
    if (!extracted || j.is_discarded()) {
      std::string head(raw.substr(0, 200));
      throw Error(ErrorCode::kMalformedJson, "response is not a JSON object", head);
    }
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "response must be a JSON object", fragment(j));
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "sequence" && key != "actions" && key != "parts") {
      throw Error(ErrorCode::kSchemaViolation, "unexpected top-level key '" + key + "'", fragment(j));
    }
  }
  if (!j.contains("sequence") || !j.contains("actions") || !j.contains("parts")) {
    throw Error(ErrorCode::kSchemaViolation, "response needs sequence, actions and parts", fragment(j));
  }
  AgentResponse r;
  r.sequence = parseTrack(j.at("sequence"), "sequence", numFrames);
  r.actions = parseTrack(j.at("actions"), "actions", numFrames);
  const auto& parts = j.at("parts");
  if (!parts.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "parts must be an object keyed by part name", fragment(parts));
  }
  for (const auto& [key, value] : parts.items()) {
    const auto part = annotation::parsePart(key);
    if (!part) {
      throw Error(ErrorCode::kSchemaViolation, "unknown part '" + key + "'", fragment(parts));
    }
    r.parts[annotation::index(*part)] = parseTrack(value, key, numFrames);
  }
  if (r.sequence.size() > 1 ||
      (r.sequence.size() == 1 && (r.sequence[0].start != 0 || r.sequence[0].end != numFrames))) {
    throw Error(ErrorCode::kSchemaViolation, "sequence must be one segment spanning the whole clip",
                fragment(j.at("sequence")));
  }
  // Gap filling must yield a valid annotation.
  const auto ann = responseToAnnotation(r, "", numFrames, fps);
  const auto violations = annotation::validateAnnotation(ann);
  if (!violations.empty()) {
    throw Error(ErrorCode::kSchemaViolation, violations.front().track + ": " + violations.front().message);
  }
  return r;
}

annotation::HierarchicalAnnotation responseToAnnotation(const AgentResponse& response, const std::string& id,
                                                        int numFrames, double fps) {
  annotation::HierarchicalAnnotation ann;
  ann.id = id;
  ann.numFrames = numFrames;
  ann.fps = fps;
  ann.sequence = response.sequence;
  ann.actions = response.actions;
  ann.parts = response.parts;
  return annotation::fillUnknownGaps(std::move(ann));
}

}  // namespace partmotion::agent
