#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "partmotion/conditioning/condition_grid.hpp"
#include "partmotion/diffusion/checkpoint.hpp"
#include "partmotion/diffusion/trainer.hpp"
#include "partmotion/eval/suite.hpp"
#include "partmotion/synth/generator.hpp"

// End-to-end steps shared by the command-line tool and the acceptance suite.
namespace partmotion::pipeline {

std::vector<eval::LabeledMotion> toLabeled(const std::vector<synth::SynthSample>& samples);

// Distinct non-UNKNOWN part and action labels.
std::vector<std::string> conditioningLabels(const std::vector<annotation::HierarchicalAnnotation>& anns);

// Frozen preprocessing fitted on the training split plus ready-to-train samples.
struct PreparedData {
  std::string encoderSpec;
  std::unique_ptr<conditioning::TextEncoder> encoder;
  conditioning::PcaProjector projector;
  motion::FeatureNormalizer normalizer;
  std::vector<diffusion::TrainingSample> samples;
};

PreparedData prepareGeneratorData(const std::vector<eval::LabeledMotion>& train, const motion::Skeleton& skeleton,
                                  const std::string& encoderSpec, std::size_t pcaDim);

// Fills the data-dependent widths (feature, PCA and text dimensions) of a
// model config from the prepared data.
diffusion::DenoiserConfig completeConfig(diffusion::DenoiserConfig config, const PreparedData& data);

diffusion::GeneratorCheckpoint makeCheckpoint(const PreparedData& data, const diffusion::Denoiser& model,
                                              const motion::Skeleton& skeleton, int diffusionSteps,
                                              nlohmann::json metadata = nlohmann::json::object());

// Generates one motion per test annotation; sample i uses a seed derived
// from (seed, i).
std::vector<eval::EvalSample> generateForSplit(const diffusion::MotionGenerator& generator,
                                               const std::vector<eval::LabeledMotion>& test, std::uint64_t seed);

// Ground truth standing in for the generator.
std::vector<eval::EvalSample> groundTruthSamples(const std::vector<eval::LabeledMotion>& test);

}  // namespace partmotion::pipeline
