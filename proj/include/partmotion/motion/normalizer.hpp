#pragma once

#include <vector>

#include <json.hpp>

#include "partmotion/nn/tensor.hpp"

namespace partmotion::motion {

// Column-wise standardization with a floor on the standard deviation.
struct FeatureNormalizer {
  std::vector<double> mean;
  std::vector<double> stddev;
  double floor = 1e-4;

  static FeatureNormalizer fit(const std::vector<const nn::Mat*>& corpus, double stdFloor = 1e-4);

  std::size_t dim() const {
    return mean.size();
  }
  void apply(nn::Mat& features) const;
  void invert(nn::Mat& features) const;

  nlohmann::json toJson() const;
  static FeatureNormalizer fromJson(const nlohmann::json& j);
};

}  // namespace partmotion::motion
