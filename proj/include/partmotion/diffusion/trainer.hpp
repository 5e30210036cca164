#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "partmotion/conditioning/masking.hpp"
#include "partmotion/diffusion/denoiser.hpp"
#include "partmotion/diffusion/schedule.hpp"
#include "partmotion/nn/optimizer.hpp"

namespace partmotion::diffusion {

// One training pair: normalized features and the unmasked condition grid.
struct TrainingSample {
  std::string id;
  nn::Mat features;  // T x d, normalized
  conditioning::ConditionGrid grid;
};

struct TrainerConfig {
  std::size_t batchSize = 32;
  std::size_t steps = 5000;
  std::size_t warmupSteps = 100;
  nn::AdamWConfig optimizer{};
  conditioning::MaskingConfig masking{};
  std::uint64_t seed = 0;
  std::size_t logEvery = 50;

  nlohmann::json toJson() const;
  static TrainerConfig fromJson(const nlohmann::json& j);
};

struct StepRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double learningRate = 0.0;
  double gradNorm = 0.0;
  double wallSeconds = 0.0;

  nlohmann::json toJson() const;
};

// Mean squared error of the sample-prediction objective over a batch,
// accumulating gradients (already divided by the batch size) into the
// denoiser's parameters. Every random draw derives from `seed`: the part drop
// probability p, then per sample σ, the noise, the masks and dropout.
// Throws Error(kNonfiniteLoss) naming the first offending sample.
double batchLossAndGrad(Denoiser& model, const NoiseSchedule& schedule, const conditioning::MaskingConfig& masking,
                        const std::vector<const TrainingSample*>& batch, std::uint64_t seed);

class DiffusionTrainer {
 public:
  DiffusionTrainer(Denoiser& model, const NoiseSchedule& schedule, TrainerConfig config);

  // One optimizer step on a batch drawn from the data. Step k (0-based) uses
  // seeds derived from (config.seed, k), so a run is reproducible.
  StepRecord step(const std::vector<TrainingSample>& data);

  // Runs the remaining configured steps, calling onRecord every logEvery steps.
  std::vector<StepRecord> run(const std::vector<TrainingSample>& data,
                              const std::function<void(const StepRecord&)>& onRecord = {});

  std::size_t stepsDone() const {
    return stepsDone_;
  }
  double learningRateAt(std::size_t step) const;

 private:
  Denoiser& model_;
  const NoiseSchedule& schedule_;
  TrainerConfig config_;
  nn::ParamRefs params_;
  nn::AdamW optimizer_;
  std::size_t stepsDone_ = 0;
  double wallSeconds_ = 0.0;
};

// Exponential moving average smoothing of a loss curve.
std::vector<double> smoothLosses(const std::vector<double>& losses, double decay = 0.98);

std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace partmotion::diffusion
