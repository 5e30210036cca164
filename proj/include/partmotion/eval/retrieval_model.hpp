#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "partmotion/conditioning/text_encoder.hpp"
#include "partmotion/nn/layers.hpp"

namespace partmotion::eval {

struct RetrievalConfig {
  std::size_t featureDim = 121;
  std::size_t textDim = 512;
  std::size_t hidden = 96;
  std::size_t embedDim = 64;
  std::size_t maxFrames = 40;  // longer crops are subsampled at a fixed stride
  double temperature = 0.07;

  nlohmann::json toJson() const;
  static RetrievalConfig fromJson(const nlohmann::json& j);
};

struct RetrievalTrainConfig {
  std::size_t steps = 2000;
  std::size_t batchSize = 32;
  double learningRate = 1e-3;
  double weightDecay = 0.01;
  std::size_t minPairs = 200;
  std::uint64_t seed = 0;
};

// A motion crop (normalized features, T x d) paired with its label text.
struct RetrievalPair {
  nn::Mat crop;
  std::string label;
};

// Two-tower text-motion embedding model. The motion tower applies a per-frame
// MLP, mean-pools over time and projects; the text tower is an MLP over the
// text encoder output. Both outputs are unit-normalized.
class RetrievalModel {
 public:
  RetrievalModel() = default;
  RetrievalModel(const RetrievalConfig& config, std::uint64_t seed);

  const RetrievalConfig& config() const {
    return config_;
  }

  Eigen::MatrixXd embedMotions(const std::vector<const nn::Mat*>& crops) const;
  Eigen::MatrixXd embedTexts(const Eigen::MatrixXd& textEmbeddings) const;  // rows are encoder outputs

  // Symmetric InfoNCE over a batch; off-diagonal pairs with identical labels
  // are excluded from the denominators. Accumulates gradients.
  double lossAndGrad(const std::vector<const nn::Mat*>& crops, const Eigen::MatrixXd& textEmbeddings,
                     const std::vector<std::string>& labels);

  nn::ParamRefs parameters();

 private:
  nn::Mat subsample(const nn::Mat& crop) const;

  RetrievalConfig config_;
  nn::Mlp frame_;
  nn::Linear head_;
  nn::Mlp text_;
};

// Throws Error(kInsufficientData) below trainCfg.minPairs pairs.
RetrievalModel trainRetrievalModel(const std::vector<RetrievalPair>& pairs, const conditioning::TextEncoder& encoder,
                                   const RetrievalConfig& config, const RetrievalTrainConfig& trainCfg);

// Encoder outputs for each label, stacked as rows.
Eigen::MatrixXd encodeLabels(const std::vector<std::string>& labels, const conditioning::TextEncoder& encoder);

}  // namespace partmotion::eval
