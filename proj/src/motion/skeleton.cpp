#include "partmotion/motion/skeleton.hpp"

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::motion {

int Skeleton::jointIndex(std::string_view jointName) const {
  for (std::size_t j = 0; j < jointNames.size(); ++j) {
    if (jointNames[j] == jointName) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

std::vector<int> Skeleton::jointsOf(PartId part) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < partOf.size(); ++j) {
    if (partOf[j] == part) {
      out.push_back(static_cast<int>(j));
    }
  }
  return out;
}

void Skeleton::validate() const {
  const std::size_t n = parents.size();
  if (n == 0) {
    throw Error(ErrorCode::kFormat, "skeleton '" + name + "' has no joints");
  }
  if (offsets.size() != n || partOf.size() != n || (!jointNames.empty() && jointNames.size() != n)) {
    throw Error(ErrorCode::kFormat, "skeleton '" + name + "': parents/offsets/part_of lengths differ");
  }
  if (parents[0] != -1) {
    throw Error(ErrorCode::kFormat, "skeleton '" + name + "': joint 0 must be the root (parent -1)");
  }
  for (std::size_t j = 1; j < n; ++j) {
    if (parents[j] < 0 || parents[j] >= static_cast<int>(j)) {
      throw Error(ErrorCode::kFormat, "skeleton '" + name + "': joint " + std::to_string(j) +
                                          " must have a parent with a smaller index");
    }
  }
  for (PartId p : annotation::kAllParts) {
    const bool hasJoint = !jointsOf(p).empty();
    if (p == PartId::kTrajectory && hasJoint) {
      throw Error(ErrorCode::kFormat, "skeleton '" + name + "': TRAJECTORY cannot own joints");
    }
    if (p != PartId::kTrajectory && !hasJoint) {
      throw Error(ErrorCode::kFormat, "skeleton '" + name + "': part " +
                                          std::string(annotation::partKey(p)) + " has no joints");
    }
  }
}

const Skeleton& toySkeleton() {
  static const Skeleton skel = [] {
    Skeleton s;
    s.name = "toy13";
    auto add = [&s](const char* jointName, int parent, Vec3 offset, PartId part) {
      s.jointNames.emplace_back(jointName);
      s.parents.push_back(parent);
      s.offsets.push_back(offset);
      s.partOf.push_back(part);
    };
    add("pelvis", -1, Vec3(0, 0, 0), PartId::kSpine);
    add("spine", 0, Vec3(0, 0, 0.20), PartId::kSpine);
    add("head", 1, Vec3(0, 0, 0.45), PartId::kHead);
    add("left_shoulder", 1, Vec3(0, 0.18, 0.33), PartId::kLeftArm);
    add("left_elbow", 3, Vec3(0, 0, -0.28), PartId::kLeftArm);
    add("left_wrist", 4, Vec3(0, 0, -0.25), PartId::kLeftArm);
    add("right_shoulder", 1, Vec3(0, -0.18, 0.33), PartId::kRightArm);
    add("right_elbow", 6, Vec3(0, 0, -0.28), PartId::kRightArm);
    add("right_wrist", 7, Vec3(0, 0, -0.25), PartId::kRightArm);
    add("left_hip", 0, Vec3(0, 0.10, -0.05), PartId::kLeftLeg);
    add("left_knee", 9, Vec3(0, 0, -0.45), PartId::kLeftLeg);
    add("right_hip", 0, Vec3(0, -0.10, -0.05), PartId::kRightLeg);
    add("right_knee", 11, Vec3(0, 0, -0.45), PartId::kRightLeg);
    s.validate();
    return s;
  }();
  return skel;
}

nlohmann::json skeletonToJson(const Skeleton& skel) {
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& o : skel.offsets) {
    offsets.push_back({o.x(), o.y(), o.z()});
  }
  nlohmann::json parts = nlohmann::json::array();
  for (PartId p : skel.partOf) {
    parts.push_back(std::string(annotation::partKey(p)));
  }
  return {{"name", skel.name},
          {"joints", skel.jointNames},
          {"parents", skel.parents},
          {"offsets", offsets},
          {"part_of", parts}};
}

Skeleton skeletonFromJson(const nlohmann::json& j) {
  Skeleton s;
  try {
    s.name = j.value("name", std::string("skeleton"));
    s.parents = j.at("parents").get<std::vector<int>>();
    for (const auto& o : j.at("offsets")) {
      const auto v = o.get<std::vector<double>>();
      if (v.size() != 3) {
        throw Error(ErrorCode::kFormat, "skeleton offsets must be [x, y, z]");
      }
      s.offsets.emplace_back(v[0], v[1], v[2]);
    }
    for (const auto& p : j.at("part_of")) {
      const auto part = annotation::parsePart(p.get<std::string>());
      if (!part) {
        throw Error(ErrorCode::kFormat, "unknown part '" + p.get<std::string>() + "' in skeleton");
      }
      s.partOf.push_back(*part);
    }
    if (j.contains("joints")) {
      s.jointNames = j.at("joints").get<std::vector<std::string>>();
    } else {
      for (std::size_t i = 0; i < s.parents.size(); ++i) {
        s.jointNames.push_back("joint" + std::to_string(i));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("skeleton file: ") + e.what());
  }
  s.validate();
  return s;
}

Skeleton loadSkeleton(const std::filesystem::path& path) {
  try {
    return skeletonFromJson(nlohmann::json::parse(readTextFile(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("skeleton file is not JSON: ") + e.what(), path.string());
  }
}

Pose restPose(const Skeleton& skel, const Vec3& rootPosition) {
  Pose p;
  p.rootPosition = rootPosition;
  p.rotations.assign(skel.numJoints(), Mat3::Identity());
  return p;
}

std::vector<Vec3> forwardKinematics(const Skeleton& skel, const Pose& pose, std::vector<Mat3>& globals) {
  const std::size_t n = skel.numJoints();
  std::vector<Vec3> positions(n);
  globals.resize(n);
  globals[0] = pose.rotations[0];
  positions[0] = pose.rootPosition;
  for (std::size_t j = 1; j < n; ++j) {
    const auto parent = static_cast<std::size_t>(skel.parents[j]);
    positions[j] = positions[parent] + globals[parent] * skel.offsets[j];
    globals[j] = globals[parent] * pose.rotations[j];
  }
  return positions;
}

std::vector<Vec3> forwardKinematics(const Skeleton& skel, const Pose& pose) {
  std::vector<Mat3> globals;
  return forwardKinematics(skel, pose, globals);
}

}  // namespace partmotion::motion
