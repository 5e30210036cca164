#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "partmotion/conditioning/text_encoder.hpp"

namespace partmotion::conditioning {

inline constexpr std::size_t kDefaultPcaDim = 50;

// Centered linear projection onto the top principal directions of a label
// embedding cloud. Each component's largest-magnitude entry is positive.
struct PcaProjector {
  Eigen::VectorXd mean;            // E
  Eigen::MatrixXd components;      // E x D, orthonormal columns
  Eigen::VectorXd explainedVariance;  // D, descending
  std::string encoderFingerprint;

  std::size_t inputDim() const {
    return static_cast<std::size_t>(components.rows());
  }
  std::size_t outputDim() const {
    return static_cast<std::size_t>(components.cols());
  }

  Eigen::VectorXd project(const Eigen::VectorXd& embedding) const;
  // Mean + components * coefficients.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& coefficients) const;

  // Short content hash for checkpoints that reference a projector.
  std::string fingerprint() const;

  nlohmann::json toJson() const;
  static PcaProjector fromJson(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static PcaProjector load(const std::filesystem::path& path);
};

// Fits on the distinct, non-UNKNOWN labels given (duplicates are ignored).
// Throws Error(kInsufficientLabels) with fewer than D distinct labels and
// Error(kConfig) when D exceeds the encoder dimension.
PcaProjector fitLabelPca(const std::vector<std::string>& labels, const TextEncoder& encoder, std::size_t dim);

// Same fit from an explicit embedding matrix (one row per sample).
PcaProjector fitPca(const Eigen::MatrixXd& embeddings, std::size_t dim, std::string encoderFingerprint = {});

}  // namespace partmotion::conditioning
