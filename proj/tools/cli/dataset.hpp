#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "partmotion/eval/suite.hpp"
#include "partmotion/motion/skeleton.hpp"
#include "partmotion/synth/splits.hpp"

namespace partmotion::cli {

// On-disk dataset written by `synth`:
//   annotations.ndjson  one annotation per line
//   motions.pmm         binary motion collection keyed by annotation id
//   skeleton.json       the skeleton the motions use
//   manifest.json       split manifest (ids per split, seed, library version)
struct DatasetDir {
  std::filesystem::path root;

  std::filesystem::path annotations() const {
    return root / "annotations.ndjson";
  }
  std::filesystem::path motions() const {
    return root / "motions.pmm";
  }
  std::filesystem::path skeleton() const {
    return root / "skeleton.json";
  }
  std::filesystem::path manifest() const {
    return root / "manifest.json";
  }
};

struct LoadedDataset {
  motion::Skeleton skeleton;
  synth::SplitManifest manifest;
  std::vector<eval::LabeledMotion> items;  // in manifest order for the split
};

// split is "train", "val", "test" or "all" (annotation file order).
LoadedDataset loadDataset(const DatasetDir& dir, const std::string& split);

}  // namespace partmotion::cli
