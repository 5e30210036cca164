#pragma once

#include <vector>

#include "partmotion/nn/tensor.hpp"

namespace partmotion::diffusion {

inline constexpr int kDefaultSteps = 100;
inline constexpr double kCosineOffset = 0.008;

// Closed-form cosine schedule: cos^2(((σ/S + s)/(1 + s))·π/2) normalized by
// its value at σ = 0.
double cosineAlphaBar(int sigma, int steps, double offset = kCosineOffset);

// Discrete schedule derived from the cosine form. β_σ = 1 - ᾱ_σ/ᾱ_{σ-1} is
// clipped at maxBeta and ᾱ recomputed as the running product, so ᾱ_S stays
// strictly positive.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(int steps = kDefaultSteps, double maxBeta = 0.999);

  int steps() const {
    return steps_;
  }
  double alphaBar(int sigma) const {
    return alphaBar_.at(static_cast<std::size_t>(sigma));
  }
  double beta(int sigma) const {
    return beta_.at(static_cast<std::size_t>(sigma));
  }
  double alpha(int sigma) const {
    return 1.0 - beta(sigma);
  }
  // Variance of q(x_{σ-1} | x_σ, x_0); zero at σ = 1.
  double posteriorVariance(int sigma) const;
  // Posterior mean = coefX0 · x̂_0 + coefXt · x_σ.
  double posteriorCoefX0(int sigma) const;
  double posteriorCoefXt(int sigma) const;

 private:
  int steps_;
  std::vector<double> alphaBar_;
  std::vector<double> beta_;
};

// x_σ = √ᾱ_σ·x0 + √(1 - ᾱ_σ)·ε. Throws Error(kShapeMismatch).
nn::Mat qSample(const nn::Mat& x0, double alphaBar, const nn::Mat& eps);
nn::Mat qSample(const nn::Mat& x0, int sigma, const nn::Mat& eps, const NoiseSchedule& schedule);

}  // namespace partmotion::diffusion
