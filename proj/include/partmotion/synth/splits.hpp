#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace partmotion::synth {

struct SplitManifest {
  std::uint64_t seed = 0;
  std::string libraryVersion;
  std::vector<std::string> train, val, test;

  nlohmann::json toJson() const;
  static SplitManifest fromJson(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static SplitManifest load(const std::filesystem::path& path);
};

// Shuffles ids with the seed and cuts them at round(0.8 n) and round(0.9 n)
// by default. Requires at least 10 ids.
SplitManifest buildDatasetSplits(const std::vector<std::string>& ids, std::uint64_t seed,
                                 double trainRatio = 0.8, double valRatio = 0.1,
                                 const std::string& libraryVersion = {});

}  // namespace partmotion::synth
