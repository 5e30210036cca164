#include "partmotion/conditioning/masking.hpp"

#include <algorithm>

#include "partmotion/common/error.hpp"

namespace partmotion::conditioning {

double MaskingConfig::clampedRate() const {
  return std::clamp(targetRate, 0.02, 0.98);
}

void MaskingConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kConfig, std::string(name) + " must be in [0, 1]");
    }
  };
  check(targetRate, "masking target rate");
  check(actionDrop, "action drop probability");
  check(sequenceDrop, "sequence drop probability");
}

double sampleBeta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double drawPartDropProbability(const MaskingConfig& cfg, std::mt19937_64& rng) {
  return sampleBeta(cfg.alpha(), cfg.beta(), rng);
}

MaskingStats maskWithProbability(ConditionGrid& grid, double p, const MaskingConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MaskingStats stats;
  stats.partDropProbability = p;
  for (std::size_t k = 0; k < kNumParts; ++k) {
    for (const auto& span : grid.spans[k]) {
      ++stats.labeledPartSegments;
      if (u(rng) < p) {
        grid.clearBlock(k, span.start, span.end);
        ++stats.droppedPartSegments;
      }
    }
  }
  for (const auto& span : grid.spans[annotation::kActionColumn]) {
    if (u(rng) < cfg.actionDrop) {
      grid.clearBlock(annotation::kActionColumn, span.start, span.end);
      stats.actionDropped = true;
    }
  }
  if (u(rng) < cfg.sequenceDrop) {
    grid.clearSequence();
    stats.sequenceDropped = true;
  }
  // Masked spans no longer carry labels.
  for (std::size_t c = 0; c < kGridColumns; ++c) {
    auto& spans = grid.spans[c];
    std::erase_if(spans, [&](const LabeledSpan& s) { return !grid.isKnown(static_cast<std::size_t>(s.start), c); });
  }
  return stats;
}

ConditionGrid applyStochasticMasking(const ConditionGrid& grid, const MaskingConfig& cfg, std::uint64_t seed,
                                     MaskingStats* stats) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ConditionGrid out = grid;
  const double p = drawPartDropProbability(cfg, rng);
  const MaskingStats s = maskWithProbability(out, p, cfg, rng);
  if (stats != nullptr) {
    *stats = s;
  }
  return out;
}

}  // namespace partmotion::conditioning
