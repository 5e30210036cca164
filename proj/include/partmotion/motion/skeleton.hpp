#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "partmotion/annotation/annotation.hpp"
#include "partmotion/motion/rotation.hpp"

namespace partmotion::motion {

using annotation::PartId;

// Rooted joint tree in topological order (parents[j] < j, root at 0 with
// parent -1). Z is up; the root's local +X axis is the body's forward axis.
struct Skeleton {
  std::string name;
  std::vector<std::string> jointNames;
  std::vector<int> parents;
  std::vector<Vec3> offsets;      // from parent, in the parent's frame, meters
  std::vector<PartId> partOf;     // TRAJECTORY is never assigned to a joint

  std::size_t numJoints() const {
    return parents.size();
  }
  int jointIndex(std::string_view jointName) const;  // -1 if absent
  std::vector<int> jointsOf(PartId part) const;

  // Throws Error(kFormat) when the tree or part map is malformed.
  void validate() const;
};

// 13-joint toy body: pelvis, spine, head, two arms (shoulder, elbow, wrist)
// and two legs (hip, knee).
const Skeleton& toySkeleton();

nlohmann::json skeletonToJson(const Skeleton& skel);
Skeleton skeletonFromJson(const nlohmann::json& j);
Skeleton loadSkeleton(const std::filesystem::path& path);

// One frame: root translation plus per-joint rotations. rotations[0] is the
// root's global orientation; the rest are local to the parent joint.
struct Pose {
  Vec3 rootPosition = Vec3::Zero();
  std::vector<Mat3> rotations;
};

struct MotionSequence {
  double fps = 20.0;
  std::vector<Pose> frames;

  std::size_t numFrames() const {
    return frames.size();
  }
};

Pose restPose(const Skeleton& skel, const Vec3& rootPosition = Vec3::Zero());

// World-space joint positions.
std::vector<Vec3> forwardKinematics(const Skeleton& skel, const Pose& pose);
// Also returns global joint orientations.
std::vector<Vec3> forwardKinematics(const Skeleton& skel, const Pose& pose, std::vector<Mat3>& globals);

}  // namespace partmotion::motion
