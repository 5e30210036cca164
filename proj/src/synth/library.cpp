#include "partmotion/synth/library.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "partmotion/common/error.hpp"
#include "partmotion/motion/skeleton.hpp"

namespace partmotion::synth {
namespace {

using motion::axisAngle;
using motion::Mat3;
using motion::Vec3;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

Library buildDefault() {
  Library lib;
  using P = PartId;
  lib.atomics = {
      {"raise_left_arm", AtomicKind::kRaiseArm, 1, {P::kLeftArm},
       {"raise left arm", "raise the left arm", "lift left arm", "left arm goes up", "raise left hand"}, 20, 2.3, 2.8, {}},
      {"raise_right_arm", AtomicKind::kRaiseArm, -1, {P::kRightArm},
       {"raise right arm", "raise the right arm", "lift right arm", "right arm goes up", "raise right hand"}, 20, 2.3, 2.8, {}},
      {"wave_left_arm", AtomicKind::kWaveArm, 1, {P::kLeftArm},
       {"wave left arm", "wave the left hand", "left hand waves", "wave with left arm", "waving left arm"}, 20, 0.4, 0.7, {}},
      {"wave_right_arm", AtomicKind::kWaveArm, -1, {P::kRightArm},
       {"wave right arm", "wave the right hand", "right hand waves", "wave with right arm", "waving right arm"}, 20, 0.4, 0.7, {}},
      {"step", AtomicKind::kStepCycle, 0, {P::kLeftLeg, P::kRightLeg},
       {"step", "take steps", "legs step", "walking steps", "alternate steps"}, 20, 0.35, 0.55, {}},
      {"bend_spine", AtomicKind::kBendSpine, 0, {P::kSpine},
       {"bend forward", "lean forward", "bend spine", "bow the torso", "lean the upper body forward"}, 20, 0.5, 0.9, {}},
      {"nod_head", AtomicKind::kNodHead, 0, {P::kHead},
       {"nod head", "nod", "head nods", "nod the head", "bob head up and down"}, 16, 0.3, 0.5, {}},
      {"turn", AtomicKind::kTurn, 0, {P::kTrajectory},
       {"turn around", "turn left", "rotate in place", "turn body around", "spin around"}, 20, std::numbers::pi / 2,
       std::numbers::pi, {}},
      {"advance", AtomicKind::kAdvance, 0, {P::kTrajectory},
       {"move forward", "walk forward", "go forward", "advance", "travel forward"}, 20, 0.8, 1.4, {}},
      {"crouch", AtomicKind::kCrouch, 0, {P::kLeftLeg, P::kRightLeg, P::kSpine},
       {"crouch", "squat down", "crouch down", "bend knees", "lower the body"}, 20, 0.2, 0.3, {}},
  };
  for (auto& a : lib.atomics) {
    for (const auto& b : lib.atomics) {
      const bool disjoint = std::none_of(a.parts.begin(), a.parts.end(), [&](PartId p) {
        return std::find(b.parts.begin(), b.parts.end(), p) != b.parts.end();
      });
      if (disjoint) {
        a.compatibleWith.push_back(b.name);
      }
    }
  }
  lib.templates = {
      {"walk", {"walk", "walk forward", "walking"}, {"step", "advance"}, "walks forward"},
      {"walk and wave", {"walk and wave", "wave while walking"}, {"step", "advance", "wave_right_arm"},
       "walks while waving"},
      {"raise left arm", {"raise left arm", "lift the left arm"}, {"raise_left_arm"}, "raises the left arm"},
      {"raise right arm", {"raise right arm", "lift the right arm"}, {"raise_right_arm"}, "raises the right arm"},
      {"raise both arms", {"raise both arms", "lift both arms", "arms up"}, {"raise_left_arm", "raise_right_arm"},
       "raises both arms"},
      {"wave", {"wave", "wave hello", "wave the right hand"}, {"wave_right_arm"}, "waves the right hand"},
      {"wave left", {"wave with left hand", "wave left hand"}, {"wave_left_arm"}, "waves the left hand"},
      {"turn around", {"turn around", "turn in place"}, {"turn", "step"}, "turns around"},
      {"crouch", {"crouch", "squat", "crouch down"}, {"crouch"}, "crouches"},
      {"bow", {"bow", "take a bow", "bow forward"}, {"bend_spine", "nod_head"}, "bows"},
      {"nod", {"nod", "nod yes"}, {"nod_head"}, "nods"},
  };
  lib.validate();
  return lib;
}

}  // namespace

const AtomicMotionDef& Library::atomic(const std::string& name) const {
  const int i = atomicIndex(name);
  if (i < 0) {
    throw Error(ErrorCode::kTemplate, "unknown atomic", name);
  }
  return atomics[static_cast<std::size_t>(i)];
}

int Library::atomicIndex(const std::string& name) const {
  for (std::size_t i = 0; i < atomics.size(); ++i) {
    if (atomics[i].name == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

void Library::validate() const {
  if (atomics.empty() || templates.empty()) {
    throw Error(ErrorCode::kTemplate, "library needs atomics and templates");
  }
  for (const auto& t : templates) {
    if (t.actionLabels.empty() || t.atomics.empty()) {
      throw Error(ErrorCode::kTemplate, "template without labels or atomics", t.name);
    }
    for (std::size_t i = 0; i < t.atomics.size(); ++i) {
      const auto& a = atomic(t.atomics[i]);
      for (std::size_t j = i + 1; j < t.atomics.size(); ++j) {
        if (std::find(a.compatibleWith.begin(), a.compatibleWith.end(), t.atomics[j]) == a.compatibleWith.end()) {
          throw Error(ErrorCode::kTemplate, "template combines atomics sharing a part",
                      t.name + ": " + a.name + " + " + t.atomics[j]);
        }
      }
    }
  }
}

const Library& defaultLibrary() {
  static const Library lib = buildDefault();
  return lib;
}

PartPose evaluateAtomic(const Library& lib, const AtomicInstance& inst, PartId part, int frame, double fps) {
  PartPose pose;
  if (inst.atomic < 0) {
    return pose;
  }
  const auto& def = lib.atomics[static_cast<std::size_t>(inst.atomic)];
  const auto& skel = motion::toySkeleton();
  const double t = static_cast<double>(frame - inst.start) / fps;  // seconds into the segment
  const double dur = static_cast<double>(inst.end - inst.start) / fps;
  const double a = inst.amplitude;
  const Vec3 x = Vec3::UnitX();
  const Vec3 y = Vec3::UnitY();
  auto joint = [&](const char* name) { return skel.jointIndex(name); };
  const double pi = std::numbers::pi;

  switch (def.kind) {
    case AtomicKind::kRaiseArm: {
      const bool left = def.side > 0;
      const double phi = a * smoothstep(t / 0.75);
      pose.rotations.push_back({joint(left ? "left_shoulder" : "right_shoulder"), axisAngle(x, left ? phi : -phi)});
      break;
    }
    case AtomicKind::kWaveArm: {
      const bool left = def.side > 0;
      const double lift = 2.0 * smoothstep(t / 0.4);
      const double swing = a * std::sin(2.0 * pi * 2.0 * t) * smoothstep(t / 0.4);
      pose.rotations.push_back({joint(left ? "left_shoulder" : "right_shoulder"), axisAngle(x, left ? lift : -lift)});
      pose.rotations.push_back({joint(left ? "left_elbow" : "right_elbow"), axisAngle(x, left ? swing : -swing)});
      break;
    }
    case AtomicKind::kStepCycle: {
      const bool left = part == PartId::kLeftLeg;
      const double phase = 2.0 * pi * t + (left ? 0.0 : pi);
      const double ramp = smoothstep(t / 0.25);
      pose.rotations.push_back({joint(left ? "left_hip" : "right_hip"), axisAngle(y, -a * std::sin(phase) * ramp)});
      pose.rotations.push_back(
          {joint(left ? "left_knee" : "right_knee"), axisAngle(y, 1.2 * a * std::max(0.0, std::sin(phase + pi / 2)) * ramp)});
      break;
    }
    case AtomicKind::kBendSpine:
      pose.rotations.push_back({joint("spine"), axisAngle(y, a * smoothstep(t / 0.6))});
      break;
    case AtomicKind::kNodHead:
      pose.rotations.push_back({joint("head"), axisAngle(y, a * 0.5 * (1.0 - std::cos(2.0 * pi * t / 0.8)))});
      break;
    case AtomicKind::kTurn:
      pose.yawRate = t < dur ? a / dur : 0.0;
      break;
    case AtomicKind::kAdvance:
      pose.forwardSpeed = a * smoothstep(t / 0.25);
      break;
    case AtomicKind::kCrouch: {
      const double depth = a * smoothstep(t / 0.6);
      if (part == PartId::kSpine) {
        pose.rotations.push_back({joint("spine"), axisAngle(y, 1.2 * depth)});
      } else {
        const bool left = part == PartId::kLeftLeg;
        const double phi = std::acos(std::clamp(1.0 - depth / 0.9, -1.0, 1.0));
        pose.rotations.push_back({joint(left ? "left_hip" : "right_hip"), axisAngle(y, -phi)});
        pose.rotations.push_back({joint(left ? "left_knee" : "right_knee"), axisAngle(y, 2.0 * phi)});
        pose.rootDrop = depth;
      }
      break;
    }
  }
  return pose;
}

}  // namespace partmotion::synth
