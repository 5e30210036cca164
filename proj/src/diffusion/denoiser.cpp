#include "partmotion/diffusion/denoiser.hpp"

#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::diffusion {

void DenoiserConfig::validate() const {
  if (width == 0 || heads == 0 || width % heads != 0) {
    throw Error(ErrorCode::kConfig, "denoiser width must be divisible by head count");
  }
  if (width % 2 != 0) {
    throw Error(ErrorCode::kConfig, "denoiser width must be even");
  }
  if (depth == 0 || ffMultiplier == 0 || featureDim == 0 || pcaDim == 0 || textDim == 0 || maxFrames == 0) {
    throw Error(ErrorCode::kConfig, "denoiser dimensions must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kConfig, "dropout must be in [0, 1)");
  }
}

nlohmann::json DenoiserConfig::toJson() const {
  return {{"feature_dim", featureDim}, {"pca_dim", pcaDim},   {"text_dim", textDim},
          {"width", width},            {"depth", depth},      {"heads", heads},
          {"ff_multiplier", ffMultiplier}, {"dropout", dropout}, {"max_frames", maxFrames}};
}

DenoiserConfig DenoiserConfig::fromJson(const nlohmann::json& j) {
  DenoiserConfig c;
  c.featureDim = j.value("feature_dim", c.featureDim);
  c.pcaDim = j.value("pca_dim", c.pcaDim);
  c.textDim = j.value("text_dim", c.textDim);
  c.width = j.value("width", c.width);
  c.depth = j.value("depth", c.depth);
  c.heads = j.value("heads", c.heads);
  c.ffMultiplier = j.value("ff_multiplier", c.ffMultiplier);
  c.dropout = j.value("dropout", c.dropout);
  c.maxFrames = j.value("max_frames", c.maxFrames);
  c.validate();
  return c;
}

std::vector<double> timestepEmbedding(int sigma, std::size_t width) {
  const std::size_t half = width / 2;
  std::vector<double> e(width, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
    e[i] = std::sin(sigma * freq);
    e[i + half] = std::cos(sigma * freq);
  }
  return e;
}

Denoiser::Denoiser(const DenoiserConfig& config, std::uint64_t seed) : config_(config) {
  config.validate();
  std::mt19937_64 rng(seed);
  const std::size_t w = config.width;
  fusion_ = nn::Mlp("fusion", config.frameInputDim(), w, w, rng);
  sequence_ = nn::Mlp("sequence", config.textDim, w, w, rng);
  timestep_ = nn::Mlp("timestep", w, w, w, rng);
  position_ = nn::Param("position", config.maxFrames + 2, w, false);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (double& v : position_.value.values()) {
    v = normal(rng);
  }
  for (std::size_t b = 0; b < config.depth; ++b) {
    blocks_.emplace_back("block" + std::to_string(b), w, config.heads, config.ffMultiplier, config.dropout, rng);
  }
  finalNorm_ = nn::LayerNorm("final_norm", w);
  output_ = nn::Linear("output", w, config.featureDim, rng);
}

nn::Mat Denoiser::assembleInput(const conditioning::ConditionGrid& grid, const nn::Mat& noisy, int sigma,
                                DenoiserCache* cache) const {
  const std::size_t t = noisy.rows();
  if (grid.numFrames != t || noisy.cols() != config_.featureDim || grid.pcaDim != config_.pcaDim ||
      grid.sequenceEmbedding.size() != config_.textDim) {
    throw Error(ErrorCode::kShapeMismatch, "denoiser input shapes disagree with the config");
  }
  if (t == 0 || t > config_.maxFrames) {
    throw Error(ErrorCode::kShapeMismatch,
                "sequence length " + std::to_string(t) + " outside [1, " + std::to_string(config_.maxFrames) + "]");
  }
  DenoiserCache local;
  DenoiserCache& c = cache != nullptr ? *cache : local;
  c.numFrames = t;

  const nn::Mat frameIn = nn::hconcat({&grid.partFeatures, &grid.actionFeatures, &noisy});
  const nn::Mat frames = fusion_.forward(frameIn, c.fusion);

  nn::Mat seqIn(1, config_.textDim);
  std::copy(grid.sequenceEmbedding.begin(), grid.sequenceEmbedding.end(), seqIn.data());
  const nn::Mat seq = sequence_.forward(seqIn, c.sequence);

  nn::Mat timeIn(1, config_.width);
  timeIn.values() = timestepEmbedding(sigma, config_.width);
  const nn::Mat time = timestep_.forward(timeIn, c.timestep);

  nn::Mat tokens = nn::vconcat({&time, &seq, &frames});
  for (std::size_t r = 0; r < tokens.rows(); ++r) {
    double* dst = tokens.row(r);
    const double* pos = position_.value.row(r);
    for (std::size_t k = 0; k < config_.width; ++k) {
      dst[k] += pos[k];
    }
  }
  return tokens;
}

nn::Mat Denoiser::forward(const conditioning::ConditionGrid& grid, const nn::Mat& noisy, int sigma,
                          DenoiserCache* cache, std::mt19937_64* dropoutRng) const {
  DenoiserCache local;
  DenoiserCache& c = cache != nullptr ? *cache : local;
  nn::Mat x = assembleInput(grid, noisy, sigma, &c);
  c.blocks.assign(blocks_.size(), {});
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    x = blocks_[b].forward(x, c.blocks[b], dropoutRng);
  }
  const nn::Mat normed = finalNorm_.forward(x, c.finalNorm);
  c.normed = nn::sliceRows(normed, 2, c.numFrames);
  return output_.forward(c.normed);
}

void Denoiser::backward(const nn::Mat& dOutput, const DenoiserCache& cache) {
  const std::size_t t = cache.numFrames;
  const nn::Mat dFrames = output_.backward(cache.normed, dOutput);
  nn::Mat dNormed(t + 2, config_.width);
  std::copy(dFrames.data(), dFrames.data() + dFrames.size(), dNormed.row(2));
  nn::Mat dx = finalNorm_.backward(dNormed, cache.finalNorm);
  for (std::size_t b = blocks_.size(); b-- > 0;) {
    dx = blocks_[b].backward(dx, cache.blocks[b]);
  }
  for (std::size_t r = 0; r < t + 2; ++r) {
    double* g = position_.grad.row(r);
    const double* d = dx.row(r);
    for (std::size_t k = 0; k < config_.width; ++k) {
      g[k] += d[k];
    }
  }
  timestep_.backwardParamsOnly(nn::sliceRows(dx, 0, 1), cache.timestep);
  sequence_.backwardParamsOnly(nn::sliceRows(dx, 1, 1), cache.sequence);
  fusion_.backwardParamsOnly(nn::sliceRows(dx, 2, t), cache.fusion);
}

nn::ParamRefs Denoiser::parameters() {
  nn::ParamRefs out;
  fusion_.collect(out);
  sequence_.collect(out);
  timestep_.collect(out);
  out.push_back(&position_);
  for (auto& b : blocks_) {
    b.collect(out);
  }
  finalNorm_.collect(out);
  output_.collect(out);
  return out;
}

}  // namespace partmotion::diffusion
