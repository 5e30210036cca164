#pragma once

#include <string>
#include <vector>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/motion/rotation.hpp"

namespace partmotion::synth {

using annotation::PartId;

inline constexpr const char* kLibraryVersion = "toy-atomics-1";

enum class AtomicKind { kRaiseArm, kWaveArm, kStepCycle, kBendSpine, kNodHead, kTurn, kAdvance, kCrouch };

struct AtomicMotionDef {
  std::string name;                 // library key, e.g. "raise_left_arm"
  AtomicKind kind = AtomicKind::kRaiseArm;
  int side = 0;                     // +1 left, -1 right, 0 none
  std::vector<PartId> parts;
  std::vector<std::string> labels;  // label text variants, labels[0] canonical
  int minFrames = 20;
  double minAmplitude = 0.0;
  double maxAmplitude = 0.0;
  std::vector<std::string> compatibleWith;  // atomics touching disjoint parts
};

struct CompositionTemplate {
  std::string name;
  std::vector<std::string> actionLabels;  // variants
  std::vector<std::string> atomics;
  std::string phrase;  // sentence fragment, e.g. "walks forward"
};

struct Library {
  std::vector<AtomicMotionDef> atomics;
  std::vector<CompositionTemplate> templates;

  const AtomicMotionDef& atomic(const std::string& name) const;
  int atomicIndex(const std::string& name) const;  // -1 if absent
  // Throws Error(kTemplate) if a template references a missing atomic or
  // combines atomics that share a part.
  void validate() const;
};

const Library& defaultLibrary();

// Contribution of one atomic instance at a frame, for one part.
struct PartPose {
  std::vector<std::pair<int, motion::Mat3>> rotations;  // joint index, local rotation
  double forwardSpeed = 0.0;  // m/s along the body's forward axis
  double yawRate = 0.0;       // rad/s
  double rootDrop = 0.0;      // m, lowering of the pelvis
};

struct AtomicInstance {
  int atomic = -1;  // index into Library::atomics; -1 is idle
  double amplitude = 0.0;
  int start = 0;
  int end = 0;
};

// Evaluates an instance for one part at a global frame. Frames past the end
// keep evolving (periodic atomics) or hold (ramped atomics), which is what the
// crossfade into the next segment blends from.
PartPose evaluateAtomic(const Library& lib, const AtomicInstance& inst, PartId part, int frame, double fps);

}  // namespace partmotion::synth
