#include "partmotion/motion/features.hpp"

#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::motion {

double headingYaw(const Mat3& rootOrientation) {
  const Vec3 forward = rootOrientation.col(0);
  const double planar = std::hypot(forward.x(), forward.y());
  if (planar < 1e-6) {
    throw Error(ErrorCode::kSingularHeading, "root forward axis is vertical; yaw is undefined");
  }
  return std::atan2(forward.y(), forward.x());
}

namespace {

CanonicalFrame canonicalizeWithYaw(const Skeleton& skel, const Pose& pose, double yaw) {
  CanonicalFrame out;
  out.yaw = yaw;
  const Mat3 unyaw = rotationZ(-yaw);
  out.residual = unyaw * pose.rotations[0];
  const Vec3 shift(pose.rootPosition.x(), pose.rootPosition.y(), 0.0);
  const auto world = forwardKinematics(skel, pose);
  out.joints.reserve(world.size());
  for (const auto& p : world) {
    out.joints.push_back(unyaw * (p - shift));
  }
  return out;
}

}  // namespace

CanonicalFrame canonicalizeFrame(const Skeleton& skel, const Pose& pose) {
  return canonicalizeWithYaw(skel, pose, headingYaw(pose.rotations[0]));
}

PoseFeatureMatrix encodeFeatures(const MotionSequence& motion, const Skeleton& skel) {
  const std::size_t t = motion.numFrames();
  const std::size_t nj = skel.numJoints();
  if (t < 2) {
    throw Error(ErrorCode::kShapeMismatch, "encodeFeatures needs at least 2 frames");
  }
  const FeatureLayout layout{nj};
  std::vector<CanonicalFrame> frames;
  frames.reserve(t);
  double previousYaw = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const Pose& pose = motion.frames[i];
    if (pose.rotations.size() != nj) {
      throw Error(ErrorCode::kShapeMismatch, "frame " + std::to_string(i) + " has " +
                                                 std::to_string(pose.rotations.size()) + " rotations, expected " +
                                                 std::to_string(nj));
    }
    double yaw = previousYaw;
    try {
      yaw = headingYaw(pose.rotations[0]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularHeading) {
        throw;
      }
    }
    frames.push_back(canonicalizeWithYaw(skel, pose, yaw));
    previousYaw = yaw;
  }

  PoseFeatureMatrix out;
  out.fps = motion.fps;
  out.values = nn::Mat(t, layout.dim());
  for (std::size_t i = 0; i < t; ++i) {
    double* row = out.values.row(i);
    const Pose& pose = motion.frames[i];
    row[FeatureLayout::kRootZ] = pose.rootPosition.z();
    if (i + 1 < t) {
      const Vec3 delta = motion.frames[i + 1].rootPosition - pose.rootPosition;
      const Vec3 local = rotationZ(-frames[i].yaw) * Vec3(delta.x(), delta.y(), 0.0) * motion.fps;
      row[FeatureLayout::kVelX] = local.x();
      row[FeatureLayout::kVelY] = local.y();
      row[FeatureLayout::kYawRate] = wrapAngle(frames[i + 1].yaw - frames[i].yaw) * motion.fps;
    }
    for (std::size_t j = 0; j < nj; ++j) {
      const Mat3& rot = j == 0 ? frames[i].residual : pose.rotations[j];
      const Vec6 sixd = encodeRot6d(rot);
      for (int c = 0; c < 6; ++c) {
        row[layout.rotation(j) + static_cast<std::size_t>(c)] = sixd[c];
      }
      for (int c = 0; c < 3; ++c) {
        row[layout.joint(j) + static_cast<std::size_t>(c)] = frames[i].joints[j][c];
      }
    }
  }
  // Last frame repeats the previous velocities.
  double* last = out.values.row(t - 1);
  const double* prev = out.values.row(t - 2);
  last[FeatureLayout::kVelX] = prev[FeatureLayout::kVelX];
  last[FeatureLayout::kVelY] = prev[FeatureLayout::kVelY];
  last[FeatureLayout::kYawRate] = prev[FeatureLayout::kYawRate];
  return out;
}

DecodedMotion decodeFeatures(const PoseFeatureMatrix& features, const Skeleton& skel, const Vec2& initialXY,
                             double initialYaw) {
  const std::size_t nj = skel.numJoints();
  const FeatureLayout layout{nj};
  if (features.values.cols() != layout.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "feature width " + std::to_string(features.values.cols()) +
                                               " does not match skeleton (expected " +
                                               std::to_string(layout.dim()) + ")");
  }
  const std::size_t t = features.numFrames();
  DecodedMotion out;
  out.motion.fps = features.fps;
  out.motion.frames.resize(t);
  out.featureJoints.resize(t);
  Vec2 xy = initialXY;
  double yaw = initialYaw;
  for (std::size_t i = 0; i < t; ++i) {
    const double* row = features.values.row(i);
    Pose& pose = out.motion.frames[i];
    pose.rootPosition = Vec3(xy.x(), xy.y(), row[FeatureLayout::kRootZ]);
    pose.rotations.resize(nj);
    const Mat3 yawRot = rotationZ(yaw);
    for (std::size_t j = 0; j < nj; ++j) {
      Vec6 sixd;
      for (int c = 0; c < 6; ++c) {
        sixd[c] = row[layout.rotation(j) + static_cast<std::size_t>(c)];
      }
      const Mat3 rot = decodeRot6d(sixd);
      pose.rotations[j] = j == 0 ? Mat3(yawRot * rot) : rot;
    }
    auto& joints = out.featureJoints[i];
    joints.resize(nj);
    for (std::size_t j = 0; j < nj; ++j) {
      const Vec3 local(row[layout.joint(j)], row[layout.joint(j) + 1], row[layout.joint(j) + 2]);
      joints[j] = yawRot * local + Vec3(xy.x(), xy.y(), 0.0);
    }
    const Vec3 worldVel = yawRot * Vec3(row[FeatureLayout::kVelX], row[FeatureLayout::kVelY], 0.0);
    xy += worldVel.head<2>() / features.fps;
    yaw += row[FeatureLayout::kYawRate] / features.fps;
  }
  return out;
}

MotionSequence rotateAboutZ(const MotionSequence& motion, double angle, const Vec2& shift) {
  MotionSequence out = motion;
  const Mat3 rz = rotationZ(angle);
  for (auto& pose : out.frames) {
    pose.rootPosition = rz * pose.rootPosition + Vec3(shift.x(), shift.y(), 0.0);
    pose.rotations[0] = rz * pose.rotations[0];
  }
  return out;
}

}  // namespace partmotion::motion
