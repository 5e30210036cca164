#include "partmotion/conditioning/condition_grid.hpp"

#include <algorithm>

#include "partmotion/common/error.hpp"

namespace partmotion::conditioning {

LabelEmbedder::LabelEmbedder(const TextEncoder& encoder, const PcaProjector& projector)
    : encoder_(encoder), projector_(projector) {
  if (projector.inputDim() != encoder.dim()) {
    throw Error(ErrorCode::kConfig, "projector input dimension does not match the text encoder");
  }
}

const Eigen::VectorXd& LabelEmbedder::labelFeature(const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = projected_.find(text);
  if (it == projected_.end()) {
    it = projected_.emplace(text, projector_.project(encoder_.encode(text))).first;
  }
  return it->second;
}

const Eigen::VectorXd& LabelEmbedder::sentenceEmbedding(const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = raw_.find(text);
  if (it == raw_.end()) {
    it = raw_.emplace(text, encoder_.encode(text)).first;
  }
  return it->second;
}

void ConditionGrid::clearBlock(std::size_t column, int start, int end) {
  nn::Mat& target = column == annotation::kActionColumn ? actionFeatures : partFeatures;
  const std::size_t col0 = column == annotation::kActionColumn ? 0 : column * pcaDim;
  for (int f = start; f < end; ++f) {
    const auto row = static_cast<std::size_t>(f);
    std::fill_n(target.row(row) + col0, pcaDim, 0.0);
    known[row * kGridColumns + column] = 0;
  }
}

void ConditionGrid::clearSequence() {
  std::fill(sequenceEmbedding.begin(), sequenceEmbedding.end(), 0.0);
  sequenceKnown = false;
}

ConditionGrid buildConditionGrid(const annotation::HierarchicalAnnotation& ann, const LabelEmbedder& embedder) {
  const auto frameGrid = annotation::toFrameGrid(ann);
  const std::size_t t = static_cast<std::size_t>(ann.numFrames);
  const std::size_t d = embedder.pcaDim();

  ConditionGrid grid;
  grid.numFrames = t;
  grid.pcaDim = d;
  grid.partFeatures = nn::Mat(t, kNumParts * d);
  grid.actionFeatures = nn::Mat(t, d);
  grid.known.assign(t * kGridColumns, 0);
  grid.sequenceEmbedding.assign(embedder.textDim(), 0.0);

  auto fillColumn = [&](std::size_t column, const annotation::Track& track) {
    nn::Mat& target = column == annotation::kActionColumn ? grid.actionFeatures : grid.partFeatures;
    const std::size_t col0 = column == annotation::kActionColumn ? 0 : column * d;
    for (const auto& seg : track) {
      if (seg.label.isUnknown()) {
        continue;
      }
      const Eigen::VectorXd& feature = embedder.labelFeature(seg.label.text());
      for (int f = seg.start; f < seg.end; ++f) {
        const auto row = static_cast<std::size_t>(f);
        std::copy(feature.data(), feature.data() + d, target.row(row) + col0);
        grid.known[row * kGridColumns + column] = 1;
      }
      grid.spans[column].push_back({seg.start, seg.end});
    }
  };
  for (auto part : annotation::kAllParts) {
    fillColumn(annotation::index(part), ann.part(part));
  }
  fillColumn(annotation::kActionColumn, ann.actions);

  if (!frameGrid.sequence.isUnknown()) {
    const Eigen::VectorXd& e = embedder.sentenceEmbedding(frameGrid.sequence.text());
    std::copy(e.data(), e.data() + e.size(), grid.sequenceEmbedding.begin());
    grid.sequenceKnown = true;
  }
  return grid;
}

}  // namespace partmotion::conditioning
