#pragma once

#include <vector>

#include "partmotion/motion/skeleton.hpp"
#include "partmotion/nn/tensor.hpp"

namespace partmotion::motion {

// Per-frame feature layout:
//   [root z | local root velocity x, y | yaw rate | 6D rotations (6J) | joints (3J)]
// Velocities are per second and expressed in the frame's yaw-aligned body frame.
struct FeatureLayout {
  static constexpr std::size_t kRootZ = 0;
  static constexpr std::size_t kVelX = 1;
  static constexpr std::size_t kVelY = 2;
  static constexpr std::size_t kYawRate = 3;
  static constexpr std::size_t kRotations = 4;

  std::size_t numJoints = 0;

  std::size_t rotation(std::size_t joint) const {
    return kRotations + 6 * joint;
  }
  std::size_t jointsBegin() const {
    return kRotations + 6 * numJoints;
  }
  std::size_t joint(std::size_t j) const {
    return jointsBegin() + 3 * j;
  }
  std::size_t dim() const {
    return 4 + 9 * numJoints;
  }
};

inline std::size_t featureDim(std::size_t numJoints) {
  return FeatureLayout{numJoints}.dim();
}

struct PoseFeatureMatrix {
  double fps = 20.0;
  nn::Mat values;  // T x d

  std::size_t numFrames() const {
    return values.rows();
  }
};

struct CanonicalFrame {
  double yaw = 0.0;
  Mat3 residual = Mat3::Identity();  // rotationZ(-yaw) * root orientation
  std::vector<Vec3> joints;          // yaw removed, root xy moved to the origin
};

// Heading of the root: atan2 of its forward (+X) axis projected on the ground.
// Throws Error(kSingularHeading) when the axis is within 1e-6 of vertical.
double headingYaw(const Mat3& rootOrientation);

CanonicalFrame canonicalizeFrame(const Skeleton& skel, const Pose& pose);

// Requires at least two frames. A singular heading reuses the previous
// frame's yaw (0 on the first frame).
PoseFeatureMatrix encodeFeatures(const MotionSequence& motion, const Skeleton& skel);

struct DecodedMotion {
  MotionSequence motion;
  // Joint positions read back from the feature block, placed in the world
  // with the integrated root trajectory; for diagnostics against FK.
  std::vector<std::vector<Vec3>> featureJoints;
};

DecodedMotion decodeFeatures(const PoseFeatureMatrix& features, const Skeleton& skel,
                             const Vec2& initialXY = Vec2::Zero(), double initialYaw = 0.0);

// Rotates a motion about the vertical axis through the origin, then shifts it in xy.
MotionSequence rotateAboutZ(const MotionSequence& motion, double angle, const Vec2& shift = Vec2::Zero());

}  // namespace partmotion::motion
