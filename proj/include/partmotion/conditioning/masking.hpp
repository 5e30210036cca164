#pragma once

#include <cstdint>
#include <random>

#include "partmotion/conditioning/condition_grid.hpp"

namespace partmotion::conditioning {

// Part-label dropout: per step p ~ Beta(5r, 5(1 - r)), then every labeled
// part segment is zeroed independently with probability p. Action windows and
// the sequence text drop with fixed probabilities.
struct MaskingConfig {
  double targetRate = 0.5;
  double actionDrop = 0.1;
  double sequenceDrop = 0.1;

  double clampedRate() const;
  double alpha() const {
    return 5.0 * clampedRate();
  }
  double beta() const {
    return 5.0 * (1.0 - clampedRate());
  }
  // Throws Error(kConfig) for drop probabilities outside [0, 1].
  void validate() const;
};

double sampleBeta(double a, double b, std::mt19937_64& rng);

// One draw of the part drop probability p.
double drawPartDropProbability(const MaskingConfig& cfg, std::mt19937_64& rng);

struct MaskingStats {
  double partDropProbability = 0.0;
  std::size_t labeledPartSegments = 0;
  std::size_t droppedPartSegments = 0;
  bool actionDropped = false;  // true if any action window was dropped
  bool sequenceDropped = false;
};

// Masks in place with a given p; consumes rng draws in a fixed order
// (part segments by part then time, action windows, sequence).
MaskingStats maskWithProbability(ConditionGrid& grid, double p, const MaskingConfig& cfg, std::mt19937_64& rng);

// Draws p, masks a copy of the grid. Reproducible from the seed.
ConditionGrid applyStochasticMasking(const ConditionGrid& grid, const MaskingConfig& cfg, std::uint64_t seed,
                                     MaskingStats* stats = nullptr);

}  // namespace partmotion::conditioning
