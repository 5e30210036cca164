#include "partmotion/diffusion/sampler.hpp"

#include <cmath>
#include <random>

#include "partmotion/common/error.hpp"

namespace partmotion::diffusion {

nn::Mat ddpmSample(const Predictor& predict, const NoiseSchedule& schedule, std::size_t frames, std::size_t dim,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  nn::Mat x(frames, dim);
  for (double& v : x.values()) {
    v = normal(rng);
  }
  for (int sigma = schedule.steps(); sigma >= 1; --sigma) {
    nn::Mat x0 = predict(x, sigma);
    if (!x0.sameShape(x)) {
      throw Error(ErrorCode::kShapeMismatch, "predictor changed the sample shape");
    }
    if (sigma == 1) {
      x = std::move(x0);
    } else {
      const double a = schedule.posteriorCoefX0(sigma);
      const double b = schedule.posteriorCoefXt(sigma);
      const double sd = std::sqrt(schedule.posteriorVariance(sigma));
      for (std::size_t i = 0; i < x.size(); ++i) {
        x.data()[i] = a * x0.data()[i] + b * x.data()[i] + sd * normal(rng);
      }
    }
    if (!nn::allFinite(x)) {
      throw Error(ErrorCode::kNonfiniteSample, "non-finite value at diffusion step " + std::to_string(sigma));
    }
  }
  return x;
}

nn::Mat ddpmSample(const Denoiser& model, const NoiseSchedule& schedule, const conditioning::ConditionGrid& grid,
                   std::uint64_t seed) {
  const Predictor predict = [&](const nn::Mat& noisy, int sigma) { return model.forward(grid, noisy, sigma); };
  return ddpmSample(predict, schedule, grid.numFrames, model.config().featureDim, seed);
}

}  // namespace partmotion::diffusion
