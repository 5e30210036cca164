#include "partmotion/diffusion/trainer.hpp"

#include <chrono>
#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::diffusion {

std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

nlohmann::json TrainerConfig::toJson() const {
  return {{"batch_size", batchSize},
          {"steps", steps},
          {"warmup_steps", warmupSteps},
          {"lr", optimizer.learningRate},
          {"weight_decay", optimizer.weightDecay},
          {"clip_norm", optimizer.clipNorm},
          {"mask_rate", masking.targetRate},
          {"action_drop", masking.actionDrop},
          {"sequence_drop", masking.sequenceDrop},
          {"seed", seed},
          {"log_every", logEvery}};
}

TrainerConfig TrainerConfig::fromJson(const nlohmann::json& j) {
  TrainerConfig c;
  c.batchSize = j.value("batch_size", c.batchSize);
  c.steps = j.value("steps", c.steps);
  c.warmupSteps = j.value("warmup_steps", c.warmupSteps);
  c.optimizer.learningRate = j.value("lr", c.optimizer.learningRate);
  c.optimizer.weightDecay = j.value("weight_decay", c.optimizer.weightDecay);
  c.optimizer.clipNorm = j.value("clip_norm", c.optimizer.clipNorm);
  c.masking.targetRate = j.value("mask_rate", c.masking.targetRate);
  c.masking.actionDrop = j.value("action_drop", c.masking.actionDrop);
  c.masking.sequenceDrop = j.value("sequence_drop", c.masking.sequenceDrop);
  c.seed = j.value("seed", c.seed);
  c.logEvery = j.value("log_every", c.logEvery);
  return c;
}

nlohmann::json StepRecord::toJson() const {
  return {{"step", step}, {"loss", loss}, {"lr", learningRate}, {"grad_norm", gradNorm}, {"wall_time", wallSeconds}};
}

double batchLossAndGrad(Denoiser& model, const NoiseSchedule& schedule, const conditioning::MaskingConfig& masking,
                        const std::vector<const TrainingSample*>& batch, std::uint64_t seed) {
  if (batch.empty()) {
    throw Error(ErrorCode::kConfig, "empty training batch");
  }
  std::mt19937_64 stepRng(seed);
  const double p = conditioning::drawPartDropProbability(masking, stepRng);
  const double invBatch = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const TrainingSample& s = *batch[b];
    std::mt19937_64 rng(deriveSeed(seed, b));
    const int sigma = std::uniform_int_distribution<int>(1, schedule.steps())(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    nn::Mat eps(s.features.rows(), s.features.cols());
    for (double& e : eps.values()) {
      e = normal(rng);
    }
    conditioning::ConditionGrid grid = s.grid;
    conditioning::maskWithProbability(grid, p, masking, rng);
    const nn::Mat noisy = qSample(s.features, sigma, eps, schedule);

    DenoiserCache cache;
    const nn::Mat pred = model.forward(grid, noisy, sigma, &cache, &rng);
    const double n = static_cast<double>(pred.size());
    nn::Mat dPred(pred.rows(), pred.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double diff = pred.data()[i] - s.features.data()[i];
      loss += diff * diff;
      dPred.data()[i] = 2.0 * diff / n * invBatch;
    }
    loss /= n;
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonfiniteLoss, "non-finite loss", s.id);
    }
    model.backward(dPred, cache);
    total += loss;
  }
  return total * invBatch;
}

DiffusionTrainer::DiffusionTrainer(Denoiser& model, const NoiseSchedule& schedule, TrainerConfig config)
    : model_(model),
      schedule_(schedule),
      config_(config),
      params_(model.parameters()),
      optimizer_(params_, config.optimizer) {
  config_.masking.validate();
  if (config_.batchSize == 0) {
    throw Error(ErrorCode::kConfig, "batch size must be positive");
  }
}

double DiffusionTrainer::learningRateAt(std::size_t step) const {
  const double base = config_.optimizer.learningRate;
  if (config_.warmupSteps == 0 || step >= config_.warmupSteps) {
    return base;
  }
  return base * static_cast<double>(step + 1) / static_cast<double>(config_.warmupSteps);
}

StepRecord DiffusionTrainer::step(const std::vector<TrainingSample>& data) {
  if (data.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no training samples");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t stepSeed = deriveSeed(config_.seed, stepsDone_);
  std::mt19937_64 pick(deriveSeed(stepSeed, 0xBA7C4ULL));
  std::uniform_int_distribution<std::size_t> which(0, data.size() - 1);
  std::vector<const TrainingSample*> batch;
  batch.reserve(config_.batchSize);
  for (std::size_t i = 0; i < config_.batchSize; ++i) {
    batch.push_back(&data[which(pick)]);
  }
  nn::zeroGrads(params_);
  StepRecord rec;
  rec.step = stepsDone_ + 1;
  rec.loss = batchLossAndGrad(model_, schedule_, config_.masking, batch, stepSeed);
  rec.learningRate = learningRateAt(stepsDone_);
  rec.gradNorm = optimizer_.step(1.0, rec.learningRate);
  ++stepsDone_;
  wallSeconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.wallSeconds = wallSeconds_;
  return rec;
}

std::vector<StepRecord> DiffusionTrainer::run(const std::vector<TrainingSample>& data,
                                              const std::function<void(const StepRecord&)>& onRecord) {
  std::vector<StepRecord> records;
  while (stepsDone_ < config_.steps) {
    records.push_back(step(data));
    if (onRecord && config_.logEvery > 0 && (stepsDone_ % config_.logEvery == 0 || stepsDone_ == config_.steps)) {
      onRecord(records.back());
    }
  }
  return records;
}

std::vector<double> smoothLosses(const std::vector<double>& losses, double decay) {
  std::vector<double> out;
  out.reserve(losses.size());
  double ema = 0.0;
  double weight = 0.0;
  for (double l : losses) {
    ema = decay * ema + (1.0 - decay) * l;
    weight = decay * weight + (1.0 - decay);
    out.push_back(ema / weight);
  }
  return out;
}

}  // namespace partmotion::diffusion
