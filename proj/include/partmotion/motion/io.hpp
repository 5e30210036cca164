#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "partmotion/motion/skeleton.hpp"

namespace partmotion::motion {

// Motion JSON:
//   {"fps": 20, "num_frames": T, "skeleton": "toy13",
//    "root_pos": [[x, y, z], ...],                 T x 3, meters
//    "joint_rot_6d": [[[6 floats] x J], ...]}      T x J x 6
// joint_rot_6d[t][0] is the root's global orientation; the remaining joints
// are local rotations relative to their parent.
nlohmann::json motionToJson(const MotionSequence& motion, const std::string& skeletonName);
MotionSequence motionFromJson(const nlohmann::json& j, std::size_t expectedJoints = 0);

void saveMotion(const std::filesystem::path& path, const MotionSequence& motion, const std::string& skeletonName);
MotionSequence loadMotion(const std::filesystem::path& path, std::size_t expectedJoints = 0);

struct NamedMotion {
  std::string id;
  MotionSequence motion;
};

// Binary collection ("PMMOTION" container): header lists ids and shapes,
// payload holds root_pos then joint_rot_6d per record as little-endian float64.
void saveMotionCollection(const std::filesystem::path& path, const std::vector<NamedMotion>& motions,
                          const std::string& skeletonName);
std::vector<NamedMotion> loadMotionCollection(const std::filesystem::path& path);

}  // namespace partmotion::motion
