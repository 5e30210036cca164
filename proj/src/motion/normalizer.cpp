#include "partmotion/motion/normalizer.hpp"

#include <algorithm>
#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::motion {

FeatureNormalizer FeatureNormalizer::fit(const std::vector<const nn::Mat*>& corpus, double stdFloor) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kInsufficientData, "normalizer needs a non-empty corpus");
  }
  const std::size_t d = corpus.front()->cols();
  std::size_t frames = 0;
  std::vector<double> sum(d, 0.0);
  for (const nn::Mat* m : corpus) {
    if (m->cols() != d) {
      throw Error(ErrorCode::kShapeMismatch, "normalizer corpus has mixed feature widths");
    }
    for (std::size_t r = 0; r < m->rows(); ++r) {
      const double* row = m->row(r);
      for (std::size_t c = 0; c < d; ++c) {
        sum[c] += row[c];
      }
    }
    frames += m->rows();
  }
  if (frames < 2) {
    throw Error(ErrorCode::kInsufficientData, "normalizer needs at least 2 frames");
  }
  FeatureNormalizer n;
  n.floor = stdFloor;
  n.mean.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    n.mean[c] = sum[c] / static_cast<double>(frames);
  }
  std::vector<double> sq(d, 0.0);
  for (const nn::Mat* m : corpus) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      const double* row = m->row(r);
      for (std::size_t c = 0; c < d; ++c) {
        const double dv = row[c] - n.mean[c];
        sq[c] += dv * dv;
      }
    }
  }
  n.stddev.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    n.stddev[c] = std::max(std::sqrt(sq[c] / static_cast<double>(frames)), stdFloor);
  }
  return n;
}

void FeatureNormalizer::apply(nn::Mat& features) const {
  if (features.cols() != dim()) {
    throw Error(ErrorCode::kShapeMismatch, "normalizer width mismatch");
  }
  for (std::size_t r = 0; r < features.rows(); ++r) {
    double* row = features.row(r);
    for (std::size_t c = 0; c < dim(); ++c) {
      row[c] = (row[c] - mean[c]) / stddev[c];
    }
  }
}

void FeatureNormalizer::invert(nn::Mat& features) const {
  if (features.cols() != dim()) {
    throw Error(ErrorCode::kShapeMismatch, "normalizer width mismatch");
  }
  for (std::size_t r = 0; r < features.rows(); ++r) {
    double* row = features.row(r);
    for (std::size_t c = 0; c < dim(); ++c) {
      row[c] = row[c] * stddev[c] + mean[c];
    }
  }
}

nlohmann::json FeatureNormalizer::toJson() const {
  return {{"mean", mean}, {"std", stddev}, {"floor", floor}};
}

FeatureNormalizer FeatureNormalizer::fromJson(const nlohmann::json& j) {
  FeatureNormalizer n;
  try {
    n.mean = j.at("mean").get<std::vector<double>>();
    n.stddev = j.at("std").get<std::vector<double>>();
    n.floor = j.value("floor", 1e-4);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("normalizer: ") + e.what());
  }
  if (n.mean.size() != n.stddev.size()) {
    throw Error(ErrorCode::kFormat, "normalizer mean/std lengths differ");
  }
  return n;
}

}  // namespace partmotion::motion
