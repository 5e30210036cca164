#pragma once

#include <array>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/conditioning/pca.hpp"
#include "partmotion/conditioning/text_encoder.hpp"
#include "partmotion/nn/tensor.hpp"

namespace partmotion::conditioning {

using annotation::kGridColumns;
using annotation::kNumParts;

// Text encoder plus projector with a memo of label features. Thread-safe.
class LabelEmbedder {
 public:
  LabelEmbedder(const TextEncoder& encoder, const PcaProjector& projector);

  // Projected D-dim label feature.
  const Eigen::VectorXd& labelFeature(const std::string& text) const;
  // Raw E-dim encoder output (used for the sequence token).
  const Eigen::VectorXd& sentenceEmbedding(const std::string& text) const;

  const TextEncoder& encoder() const {
    return encoder_;
  }
  const PcaProjector& projector() const {
    return projector_;
  }
  std::size_t pcaDim() const {
    return projector_.outputDim();
  }
  std::size_t textDim() const {
    return encoder_.dim();
  }

 private:
  const TextEncoder& encoder_;
  const PcaProjector& projector_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Eigen::VectorXd> projected_;
  mutable std::map<std::string, Eigen::VectorXd> raw_;
};

// A labeled (non-UNKNOWN) segment of one grid column.
struct LabeledSpan {
  int start = 0;
  int end = 0;

  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
};

struct ConditionGrid {
  std::size_t numFrames = 0;
  std::size_t pcaDim = 0;
  nn::Mat partFeatures;    // T x (K*D), part k occupies columns [k*D, (k+1)*D)
  nn::Mat actionFeatures;  // T x D
  std::vector<std::uint8_t> known;  // T x (K+1), column order as FrameGrid
  std::vector<double> sequenceEmbedding;  // E, zeros when unknown
  bool sequenceKnown = false;
  std::array<std::vector<LabeledSpan>, kGridColumns> spans;

  bool isKnown(std::size_t frame, std::size_t column) const {
    return known[frame * kGridColumns + column] != 0;
  }
  // Zeroes one column's block over [start, end) and clears its known flags.
  void clearBlock(std::size_t column, int start, int end);
  void clearSequence();

  friend bool operator==(const ConditionGrid&, const ConditionGrid&) = default;
};

// Throws Error(kInvalidAnnotation) if the annotation does not validate.
ConditionGrid buildConditionGrid(const annotation::HierarchicalAnnotation& ann, const LabelEmbedder& embedder);

}  // namespace partmotion::conditioning
