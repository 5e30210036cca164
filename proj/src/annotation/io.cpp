#include "partmotion/annotation/io.hpp"

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::annotation {
namespace {

int requireInt(const nlohmann::json& j, const char* key, std::string_view where) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw Error(ErrorCode::kFormat, std::string(where) + ": '" + key + "' must be an integer", j.dump());
  }
  return j.at(key).get<int>();
}

}  // namespace

nlohmann::json trackToJson(const Track& track) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : track) {
    arr.push_back({{"label", s.label.wire()}, {"start", s.start}, {"end", s.end}});
  }
  return arr;
}

Track trackFromJson(const nlohmann::json& j, std::string_view trackName) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kFormat, std::string(trackName) + ": track must be an array", j.dump());
  }
  Track track;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("label") || !e.at("label").is_string()) {
      throw Error(ErrorCode::kFormat, std::string(trackName) + ": segment needs a string 'label'", e.dump());
    }
    track.push_back({Label::fromWire(e.at("label").get<std::string>()), requireInt(e, "start", trackName),
                     requireInt(e, "end", trackName)});
  }
  return track;
}

nlohmann::json toJson(const HierarchicalAnnotation& ann) {
  nlohmann::json parts = nlohmann::json::object();
  for (PartId p : kAllParts) {
    parts[std::string(partKey(p))] = trackToJson(ann.part(p));
  }
  return {{"id", ann.id},
          {"fps", ann.fps},
          {"num_frames", ann.numFrames},
          {"sequence", trackToJson(ann.sequence)},
          {"actions", trackToJson(ann.actions)},
          {"parts", parts}};
}

HierarchicalAnnotation fromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kFormat, "annotation must be a JSON object", j.dump().substr(0, 200));
  }
  HierarchicalAnnotation ann;
  if (j.contains("id")) {
    if (!j.at("id").is_string()) {
      throw Error(ErrorCode::kFormat, "'id' must be a string");
    }
    ann.id = j.at("id").get<std::string>();
  }
  if (!j.contains("fps") || !j.at("fps").is_number()) {
    throw Error(ErrorCode::kFormat, "annotation '" + ann.id + "': 'fps' must be a number");
  }
  ann.fps = j.at("fps").get<double>();
  ann.numFrames = requireInt(j, "num_frames", ann.id);
  ann.sequence = trackFromJson(j.value("sequence", nlohmann::json::array()), "sequence");
  ann.actions = trackFromJson(j.value("actions", nlohmann::json::array()), "actions");
  if (j.contains("parts")) {
    const auto& parts = j.at("parts");
    if (!parts.is_object()) {
      throw Error(ErrorCode::kFormat, "annotation '" + ann.id + "': 'parts' must be an object");
    }
    for (const auto& [key, value] : parts.items()) {
      const auto part = parsePart(key);
      if (!part) {
        throw Error(ErrorCode::kFormat, "annotation '" + ann.id + "': unknown part '" + key + "'");
      }
      ann.part(*part) = trackFromJson(value, key);
    }
  }
  return ann;
}

std::vector<HierarchicalAnnotation> readDataset(const std::filesystem::path& path) {
  std::vector<HierarchicalAnnotation> out;
  for (const auto& row : readNdjson(path)) {
    out.push_back(fromJson(row));
  }
  return out;
}

void writeDataset(const std::filesystem::path& path, const std::vector<HierarchicalAnnotation>& anns) {
  std::vector<nlohmann::json> rows;
  rows.reserve(anns.size());
  for (const auto& a : anns) {
    rows.push_back(toJson(a));
  }
  writeNdjson(path, rows);
}

}  // namespace partmotion::annotation
