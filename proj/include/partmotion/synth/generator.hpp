#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/motion/skeleton.hpp"
#include "partmotion/synth/library.hpp"

namespace partmotion::synth {

inline constexpr int kCrossfadeFrames = 5;

struct SynthConfig {
  int minFrames = 100;
  int maxFrames = 140;
  double fps = 20.0;
  int maxWindows = 4;
  int minWindowFrames = 30;
  double asyncProbability = 0.5;  // chance an atomic is shorter than its window
};

struct SynthSample {
  motion::MotionSequence motion;
  annotation::HierarchicalAnnotation annotation;
  // Instances per part track, aligned with annotation.parts (idle = atomic -1).
  std::array<std::vector<AtomicInstance>, annotation::kNumParts> instances;
};

// Draws 1..maxWindows action windows tiling [0, T), instantiates a template
// per window and renders the motion on the toy skeleton. Part boundaries blend
// over a 5-frame crossfade in 6D rotation space.
SynthSample synthesizeSample(const Library& lib, const SynthConfig& cfg, std::mt19937_64& rng,
                             const std::string& id = "sample");

// Sample i uses an independent substream of `seed`, so the result does not
// depend on how generation is partitioned.
std::vector<SynthSample> synthesizeDataset(const Library& lib, const SynthConfig& cfg, std::size_t count,
                                           std::uint64_t seed);

// Renders part instances to a motion; exposed for the idle-baseline checks.
motion::MotionSequence renderInstances(const Library& lib,
                                       const std::array<std::vector<AtomicInstance>, annotation::kNumParts>& instances,
                                       int numFrames, double fps);

// Each labeled part segment becomes UNKNOWN with probability q; actions and
// sequence are untouched.
annotation::HierarchicalAnnotation sparsifyLabels(const annotation::HierarchicalAnnotation& ann, double q,
                                                  std::mt19937_64& rng, std::size_t* dropped = nullptr,
                                                  std::size_t* labeled = nullptr);

// Largest deviation of a part from the idle pose over [start, end): maximum
// local rotation angle of the part's joints (rad; pelvis excluded since its
// rotation carries the heading), or for TRAJECTORY the larger of net yaw
// change (rad) and planar displacement (m). Idle parts score 0.
double partActivity(const motion::MotionSequence& m, const motion::Skeleton& skel, PartId part, int start, int end);

// Mean elbow height over the last quarter minus the first quarter (m).
double elbowHeightGain(const motion::MotionSequence& m, const motion::Skeleton& skel, bool left);

}  // namespace partmotion::synth
