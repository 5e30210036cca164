#pragma once

#include <vector>

#include <json.hpp>

#include "partmotion/nn/layers.hpp"

namespace partmotion::nn {

struct AdamWConfig {
  double learningRate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weightDecay = 0.01;
  double clipNorm = 1.0;  // <= 0 disables global-norm clipping
};

class AdamW {
 public:
  AdamW(ParamRefs params, AdamWConfig config);

  // Applies one update from the accumulated gradients, scaled by gradScale
  // first (e.g. 1/batch). Returns the global gradient norm before clipping.
  double step(double gradScale = 1.0, double lrOverride = -1.0);

  const AdamWConfig& config() const {
    return config_;
  }
  long long steps() const {
    return t_;
  }

 private:
  ParamRefs params_;
  AdamWConfig config_;
  std::vector<std::vector<double>> m_, v_;
  long long t_ = 0;
};

// Flattens parameter values in collection order.
std::vector<double> flattenParams(const ParamRefs& params);
void unflattenParams(const ParamRefs& params, const std::vector<double>& flat, std::size_t offset = 0);
// {"name": [rows, cols], ...} in collection order.
nlohmann::json paramShapes(const ParamRefs& params);

}  // namespace partmotion::nn
