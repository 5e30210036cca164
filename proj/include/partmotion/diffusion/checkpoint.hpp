#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "partmotion/conditioning/condition_grid.hpp"
#include "partmotion/diffusion/denoiser.hpp"
#include "partmotion/diffusion/schedule.hpp"
#include "partmotion/motion/normalizer.hpp"
#include "partmotion/motion/skeleton.hpp"

namespace partmotion::diffusion {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to generate: model weights plus the frozen preprocessing.
struct GeneratorCheckpoint {
  Denoiser model;
  int diffusionSteps = kDefaultSteps;
  motion::FeatureNormalizer normalizer;
  conditioning::PcaProjector projector;
  std::string encoderSpec;  // e.g. "toy-hash:128"
  motion::Skeleton skeleton;
  nlohmann::json metadata = nlohmann::json::object();  // training step count, seed, ...

  void save(const std::filesystem::path& path);
  static GeneratorCheckpoint load(const std::filesystem::path& path);
};

struct GeneratedMotion {
  motion::MotionSequence motion;
  annotation::HierarchicalAnnotation annotation;
  nn::Mat normalizedFeatures;
};

// Owns the text encoder and embedder derived from a checkpoint. Generation
// is const and safe for concurrent callers.
class MotionGenerator {
 public:
  explicit MotionGenerator(GeneratorCheckpoint checkpoint);

  const GeneratorCheckpoint& checkpoint() const {
    return checkpoint_;
  }
  const conditioning::LabelEmbedder& embedder() const {
    return *embedder_;
  }
  const NoiseSchedule& schedule() const {
    return schedule_;
  }

  // Sample, denormalize, decode. The annotation must validate.
  GeneratedMotion generate(const annotation::HierarchicalAnnotation& ann, std::uint64_t seed) const;

 private:
  GeneratorCheckpoint checkpoint_;
  std::unique_ptr<conditioning::TextEncoder> encoder_;
  std::unique_ptr<conditioning::LabelEmbedder> embedder_;
  NoiseSchedule schedule_;
};

}  // namespace partmotion::diffusion
