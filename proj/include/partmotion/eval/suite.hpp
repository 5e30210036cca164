#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/eval/metrics.hpp"
#include "partmotion/eval/retrieval_model.hpp"
#include "partmotion/motion/normalizer.hpp"
#include "partmotion/motion/skeleton.hpp"

namespace partmotion::eval {

// Levels 0..6 are the parts in PartId order, then action, then sequence.
inline constexpr std::size_t kNumLevels = annotation::kNumParts + 2;
inline constexpr std::size_t kActionLevel = annotation::kNumParts;
inline constexpr std::size_t kSequenceLevel = annotation::kNumParts + 1;

std::string levelName(std::size_t level);

struct LabeledMotion {
  annotation::HierarchicalAnnotation annotation;
  motion::MotionSequence motion;
};

// Normalized full-body feature crops with their labels for one level:
// labeled part segments, labeled action windows, or the whole sequence.
std::vector<RetrievalPair> levelPairs(std::size_t level, const annotation::HierarchicalAnnotation& ann,
                                      const nn::Mat& normalizedFeatures);

struct EvaluationModels {
  std::array<RetrievalModel, kNumLevels> models;
  motion::FeatureNormalizer normalizer;
  std::string encoderSpec;
  motion::Skeleton skeleton;

  // Encodes and normalizes a motion with the evaluator's own normalizer.
  nn::Mat features(const motion::MotionSequence& m) const;

  void save(const std::filesystem::path& path);
  static EvaluationModels load(const std::filesystem::path& path);
};

struct EvalTrainConfig {
  RetrievalConfig model{};
  RetrievalTrainConfig train{};
};

// Fits the normalizer on the given data and trains one model per level.
EvaluationModels trainEvaluationModels(const std::vector<LabeledMotion>& data, const motion::Skeleton& skeleton,
                                       const std::string& encoderSpec, const EvalTrainConfig& config);

// Held-out batch R@1 (percent) of one model on its level's pairs, averaged
// over shuffled batches.
double heldOutRecallAt1(const RetrievalModel& model, const std::vector<RetrievalPair>& pairs,
                        const conditioning::TextEncoder& encoder, std::size_t batchSize, std::size_t repeats,
                        std::uint64_t seed);

struct EvalSample {
  annotation::HierarchicalAnnotation annotation;
  motion::MotionSequence groundTruth;
  motion::MotionSequence generated;
};

struct SuiteConfig {
  std::size_t repeats = 20;
  std::size_t batchSize = 32;
  std::size_t diversityPairs = 300;
  double filterThreshold = 0.9;
  std::uint64_t seed = 0;
  std::string generatorName = "model";
};

struct LevelMetrics {
  Summary r1, r3, m2t;
  std::size_t crops = 0;
};

struct RealismMetrics {
  Summary fid, diversity;
};

struct SuiteReport {
  SuiteConfig config;
  std::array<LevelMetrics, annotation::kNumParts> parts;
  LevelMetrics avgPart, action, sequence;
  RealismMetrics actionRealism, sequenceRealism;

  nlohmann::json toJson() const;
  // One row in the layout of a method-comparison table.
  std::string table() const;
};

SuiteReport evaluateSuite(const std::vector<EvalSample>& samples, const EvaluationModels& models,
                          const SuiteConfig& config);

}  // namespace partmotion::eval
