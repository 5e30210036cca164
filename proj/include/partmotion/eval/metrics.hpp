#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "partmotion/conditioning/text_encoder.hpp"

namespace partmotion::eval {

// Decides whether two label texts are paraphrases: cosine similarity of
// their sentence embeddings at or above the threshold. Identical texts are
// always paraphrases.
class FilterOracle {
 public:
  FilterOracle(const conditioning::TextEncoder& embedder, double threshold = 0.9);

  bool paraphrase(const std::string& a, const std::string& b) const;
  double threshold() const {
    return threshold_;
  }

 private:
  const Eigen::VectorXd& embed(const std::string& text) const;

  const conditioning::TextEncoder& embedder_;
  double threshold_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Eigen::VectorXd> cache_;
};

// Motion-to-text retrieval over one batch. Row i of `motion` pairs with row
// i of `text`; both are unit-normalized. Returns the percentage of motions
// whose paired text (or, with a filter, any paraphrase of it) ranks within
// the top k, for each k. Ties rank in favor of the lower index.
std::vector<double> recallAtK(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text,
                              const std::vector<std::string>& labels, const std::vector<int>& ks,
                              const FilterOracle* filter = nullptr);

// Mean cosine similarity of paired rows.
double motionToText(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text);

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // population covariance
};

GaussianStats gaussianStats(const Eigen::MatrixXd& rows);

// ‖μA − μB‖² + Tr(ΣA + ΣB − 2(ΣA ΣB)^{1/2}). The cross term uses the
// symmetric form Tr((√ΣA ΣB √ΣA)^{1/2}). Throws Error(kNonpsdCovariance)
// when an eigenvalue falls below -1e-6.
double fidFromStats(const GaussianStats& a, const GaussianStats& b);
double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Mean Euclidean distance over P random pairs (i ≠ j).
double diversity(const Eigen::MatrixXd& embeddings, std::size_t pairs, std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double halfWidth = 0.0;  // 1.96 · sd / √n
};

Summary summarize(const std::vector<double>& values);

}  // namespace partmotion::eval
