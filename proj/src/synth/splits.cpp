#include "partmotion/synth/splits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::synth {

nlohmann::json SplitManifest::toJson() const {
  return {{"seed", seed}, {"library_version", libraryVersion}, {"train", train}, {"val", val}, {"test", test}};
}

SplitManifest SplitManifest::fromJson(const nlohmann::json& j) {
  try {
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.libraryVersion = j.value("library_version", "");
    m.train = j.at("train").get<std::vector<std::string>>();
    m.val = j.at("val").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("manifest: ") + e.what());
  }
}

void SplitManifest::save(const std::filesystem::path& path) const {
  writeTextFile(path, toJson().dump(1) + "\n");
}

SplitManifest SplitManifest::load(const std::filesystem::path& path) {
  try {
    return fromJson(nlohmann::json::parse(readTextFile(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, e.what(), path.string());
  }
}

SplitManifest buildDatasetSplits(const std::vector<std::string>& ids, std::uint64_t seed, double trainRatio,
                                 double valRatio, const std::string& libraryVersion) {
  if (ids.size() < 10) {
    throw Error(ErrorCode::kInsufficientData, "splitting needs at least 10 samples");
  }
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw Error(ErrorCode::kConfig, "sample ids must be unique");
  }
  if (!(trainRatio > 0.0 && valRatio >= 0.0 && trainRatio + valRatio <= 1.0)) {
    throw Error(ErrorCode::kConfig, "invalid split ratios");
  }
  std::vector<std::string> order = ids;
  std::sort(order.begin(), order.end());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const double n = static_cast<double>(order.size());
  const auto trainEnd = static_cast<std::size_t>(std::llround(trainRatio * n));
  const auto valEnd = static_cast<std::size_t>(std::llround((trainRatio + valRatio) * n));
  SplitManifest m;
  m.seed = seed;
  m.libraryVersion = libraryVersion;
  m.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(trainEnd));
  m.val.assign(order.begin() + static_cast<std::ptrdiff_t>(trainEnd), order.begin() + static_cast<std::ptrdiff_t>(valEnd));
  m.test.assign(order.begin() + static_cast<std::ptrdiff_t>(valEnd), order.end());
  return m;
}

}  // namespace partmotion::synth
