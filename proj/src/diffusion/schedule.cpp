#include "partmotion/diffusion/schedule.hpp"

#include <cmath>
#include <numbers>

#include "partmotion/common/error.hpp"

namespace partmotion::diffusion {

double cosineAlphaBar(int sigma, int steps, double offset) {
  auto f = [&](double t) {
    const double c = std::cos(((t + offset) / (1.0 + offset)) * std::numbers::pi / 2.0);
    return c * c;
  };
  return f(static_cast<double>(sigma) / steps) / f(0.0);
}

NoiseSchedule::NoiseSchedule(int steps, double maxBeta) : steps_(steps) {
  if (steps < 1) {
    throw Error(ErrorCode::kConfig, "diffusion step count must be positive");
  }
  alphaBar_.assign(static_cast<std::size_t>(steps) + 1, 1.0);
  beta_.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  for (int s = 1; s <= steps; ++s) {
    const double b = 1.0 - cosineAlphaBar(s, steps) / cosineAlphaBar(s - 1, steps);
    beta_[static_cast<std::size_t>(s)] = std::min(b, maxBeta);
    alphaBar_[static_cast<std::size_t>(s)] = alphaBar_[static_cast<std::size_t>(s) - 1] * (1.0 - beta_[static_cast<std::size_t>(s)]);
  }
}

double NoiseSchedule::posteriorVariance(int sigma) const {
  return (1.0 - alphaBar(sigma - 1)) / (1.0 - alphaBar(sigma)) * beta(sigma);
}

double NoiseSchedule::posteriorCoefX0(int sigma) const {
  return std::sqrt(alphaBar(sigma - 1)) * beta(sigma) / (1.0 - alphaBar(sigma));
}

double NoiseSchedule::posteriorCoefXt(int sigma) const {
  return std::sqrt(alpha(sigma)) * (1.0 - alphaBar(sigma - 1)) / (1.0 - alphaBar(sigma));
}

nn::Mat qSample(const nn::Mat& x0, double alphaBar, const nn::Mat& eps) {
  if (!x0.sameShape(eps)) {
    throw Error(ErrorCode::kShapeMismatch, "q_sample: x0 and noise shapes differ");
  }
  const double a = std::sqrt(alphaBar);
  const double b = std::sqrt(1.0 - alphaBar);
  nn::Mat out(x0.rows(), x0.cols());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    out.data()[i] = a * x0.data()[i] + b * eps.data()[i];
  }
  return out;
}

nn::Mat qSample(const nn::Mat& x0, int sigma, const nn::Mat& eps, const NoiseSchedule& schedule) {
  return qSample(x0, schedule.alphaBar(sigma), eps);
}

}  // namespace partmotion::diffusion
