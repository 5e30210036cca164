#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "partmotion/annotation/annotation.hpp"

namespace partmotion::annotation {

nlohmann::json trackToJson(const Track& track);
// Throws Error(kFormat) on structural problems (missing keys, wrong types).
Track trackFromJson(const nlohmann::json& j, std::string_view trackName);

// {"id", "fps", "num_frames", "sequence", "actions", "parts": {...}}
nlohmann::json toJson(const HierarchicalAnnotation& ann);
// Parses without validating; missing part keys become empty tracks.
HierarchicalAnnotation fromJson(const nlohmann::json& j);

std::vector<HierarchicalAnnotation> readDataset(const std::filesystem::path& path);
void writeDataset(const std::filesystem::path& path, const std::vector<HierarchicalAnnotation>& anns);

}  // namespace partmotion::annotation
