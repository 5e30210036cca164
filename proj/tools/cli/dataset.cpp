#include "dataset.hpp"

#include <unordered_map>

#include "partmotion/annotation/io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/motion/io.hpp"

namespace partmotion::cli {

LoadedDataset loadDataset(const DatasetDir& dir, const std::string& split) {
  LoadedDataset out;
  out.skeleton = motion::loadSkeleton(dir.skeleton());
  out.manifest = synth::SplitManifest::load(dir.manifest());

  const auto anns = annotation::readDataset(dir.annotations());
  auto motions = motion::loadMotionCollection(dir.motions());
  std::unordered_map<std::string, std::size_t> motionIndex;
  for (std::size_t i = 0; i < motions.size(); ++i) {
    motionIndex.emplace(motions[i].id, i);
  }
  std::unordered_map<std::string, std::size_t> annIndex;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    annIndex.emplace(anns[i].id, i);
  }

  std::vector<std::string> ids;
  if (split == "all") {
    for (const auto& a : anns) {
      ids.push_back(a.id);
    }
  } else if (split == "train") {
    ids = out.manifest.train;
  } else if (split == "val") {
    ids = out.manifest.val;
  } else if (split == "test") {
    ids = out.manifest.test;
  } else {
    throw Error(ErrorCode::kConfig, "unknown split '" + split + "'", "expected train, val, test or all");
  }

  out.items.reserve(ids.size());
  for (const auto& id : ids) {
    const auto a = annIndex.find(id);
    const auto m = motionIndex.find(id);
    if (a == annIndex.end() || m == motionIndex.end()) {
      throw Error(ErrorCode::kFormat, "dataset is missing an annotation or motion for id '" + id + "'",
                  dir.root.string());
    }
    out.items.push_back({anns[a->second], motions[m->second].motion});
  }
  return out;
}

}  // namespace partmotion::cli
