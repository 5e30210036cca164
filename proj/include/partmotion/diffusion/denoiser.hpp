#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "partmotion/conditioning/condition_grid.hpp"
#include "partmotion/nn/attention.hpp"

namespace partmotion::diffusion {

struct DenoiserConfig {
  std::size_t featureDim = 121;  // d
  std::size_t pcaDim = 50;       // D
  std::size_t textDim = 512;     // E, sequence-token input width
  std::size_t width = 256;       // D_{m+t}
  std::size_t depth = 4;
  std::size_t heads = 4;
  std::size_t ffMultiplier = 4;
  double dropout = 0.1;
  std::size_t maxFrames = 200;

  std::size_t frameInputDim() const {
    return (conditioning::kNumParts + 1) * pcaDim + featureDim;
  }
  // Throws Error(kConfig).
  void validate() const;

  nlohmann::json toJson() const;
  static DenoiserConfig fromJson(const nlohmann::json& j);
};

// Sinusoidal embedding of a diffusion step, width must be even.
std::vector<double> timestepEmbedding(int sigma, std::size_t width);

struct DenoiserCache {
  nn::MlpCache fusion, sequence, timestep;
  std::vector<nn::TransformerBlockCache> blocks;
  nn::LayerNormCache finalNorm;
  nn::Mat normed;  // frame rows of the final LayerNorm output
  std::size_t numFrames = 0;
};

// Transformer denoiser predicting the clean sample x̂_0 from x_σ, σ and the
// conditioning grid. Tokens are [timestep, sequence, frame_0..frame_{T-1}].
class Denoiser {
 public:
  Denoiser() = default;
  Denoiser(const DenoiserConfig& config, std::uint64_t seed);

  const DenoiserConfig& config() const {
    return config_;
  }

  // The (T+2) x width transformer input, positional embeddings included.
  // Throws Error(kShapeMismatch) when grid, features and config disagree.
  nn::Mat assembleInput(const conditioning::ConditionGrid& grid, const nn::Mat& noisy, int sigma,
                        DenoiserCache* cache = nullptr) const;

  // T x d prediction of x_0. dropoutRng enables dropout (training only).
  nn::Mat forward(const conditioning::ConditionGrid& grid, const nn::Mat& noisy, int sigma,
                  DenoiserCache* cache = nullptr, std::mt19937_64* dropoutRng = nullptr) const;

  // Accumulates parameter gradients of a scalar loss given dL/d(output).
  void backward(const nn::Mat& dOutput, const DenoiserCache& cache);

  nn::ParamRefs parameters();

 private:
  DenoiserConfig config_;
  nn::Mlp fusion_;
  nn::Mlp sequence_;
  nn::Mlp timestep_;
  nn::Param position_;
  std::vector<nn::TransformerBlock> blocks_;
  nn::LayerNorm finalNorm_;
  nn::Linear output_;
};

}  // namespace partmotion::diffusion
