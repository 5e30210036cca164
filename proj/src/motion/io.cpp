#include "partmotion/motion/io.hpp"

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::motion {
namespace {

constexpr const char* kCollectionMagic = "PMMOTION";

Mat3 decodeOrThrow(const std::vector<double>& v, std::size_t frame, std::size_t joint) {
  if (v.size() != 6) {
    throw Error(ErrorCode::kFormat,
                "rotation at frame " + std::to_string(frame) + ", joint " + std::to_string(joint) +
                    " must have 6 values");
  }
  Vec6 s;
  for (int i = 0; i < 6; ++i) {
    s[i] = v[static_cast<std::size_t>(i)];
  }
  return decodeRot6d(s);
}

}  // namespace

nlohmann::json motionToJson(const MotionSequence& motion, const std::string& skeletonName) {
  nlohmann::json root = nlohmann::json::array();
  nlohmann::json rots = nlohmann::json::array();
  for (const auto& pose : motion.frames) {
    root.push_back({pose.rootPosition.x(), pose.rootPosition.y(), pose.rootPosition.z()});
    nlohmann::json frame = nlohmann::json::array();
    for (const auto& r : pose.rotations) {
      const Vec6 s = encodeRot6d(r);
      frame.push_back({s[0], s[1], s[2], s[3], s[4], s[5]});
    }
    rots.push_back(std::move(frame));
  }
  return {{"fps", motion.fps},
          {"num_frames", motion.numFrames()},
          {"skeleton", skeletonName},
          {"root_pos", root},
          {"joint_rot_6d", rots}};
}

MotionSequence motionFromJson(const nlohmann::json& j, std::size_t expectedJoints) {
  MotionSequence m;
  try {
    m.fps = j.at("fps").get<double>();
    const auto& root = j.at("root_pos");
    const auto& rots = j.at("joint_rot_6d");
    if (root.size() != rots.size()) {
      throw Error(ErrorCode::kFormat, "root_pos and joint_rot_6d frame counts differ");
    }
    m.frames.resize(root.size());
    for (std::size_t t = 0; t < root.size(); ++t) {
      const auto p = root[t].get<std::vector<double>>();
      if (p.size() != 3) {
        throw Error(ErrorCode::kFormat, "root_pos rows must have 3 values");
      }
      m.frames[t].rootPosition = Vec3(p[0], p[1], p[2]);
      const auto& frame = rots[t];
      if (expectedJoints != 0 && frame.size() != expectedJoints) {
        throw Error(ErrorCode::kFormat, "frame " + std::to_string(t) + " has " + std::to_string(frame.size()) +
                                            " joints, expected " + std::to_string(expectedJoints));
      }
      for (std::size_t jn = 0; jn < frame.size(); ++jn) {
        m.frames[t].rotations.push_back(decodeOrThrow(frame[jn].get<std::vector<double>>(), t, jn));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("motion file: ") + e.what());
  }
  return m;
}

void saveMotion(const std::filesystem::path& path, const MotionSequence& motion, const std::string& skeletonName) {
  writeTextFile(path, motionToJson(motion, skeletonName).dump() + "\n");
}

MotionSequence loadMotion(const std::filesystem::path& path, std::size_t expectedJoints) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(readTextFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("motion file is not JSON: ") + e.what(), path.string());
  }
  return motionFromJson(j, expectedJoints);
}

void saveMotionCollection(const std::filesystem::path& path, const std::vector<NamedMotion>& motions,
                          const std::string& skeletonName) {
  BinaryContainer c;
  c.magic = kCollectionMagic;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& nm : motions) {
    const std::size_t nj = nm.motion.frames.empty() ? 0 : nm.motion.frames.front().rotations.size();
    records.push_back({{"id", nm.id}, {"fps", nm.motion.fps}, {"num_frames", nm.motion.numFrames()},
                       {"num_joints", nj}});
    for (const auto& pose : nm.motion.frames) {
      c.payload.insert(c.payload.end(), {pose.rootPosition.x(), pose.rootPosition.y(), pose.rootPosition.z()});
    }
    for (const auto& pose : nm.motion.frames) {
      for (const auto& r : pose.rotations) {
        const Vec6 s = encodeRot6d(r);
        c.payload.insert(c.payload.end(), s.data(), s.data() + 6);
      }
    }
  }
  c.header = {{"skeleton", skeletonName}, {"records", records}};
  writeContainer(path, c);
}

std::vector<NamedMotion> loadMotionCollection(const std::filesystem::path& path) {
  const BinaryContainer c = readContainer(path, kCollectionMagic);
  std::vector<NamedMotion> out;
  std::size_t offset = 0;
  auto take = [&](std::size_t n) {
    if (offset + n > c.payload.size()) {
      throw Error(ErrorCode::kFormat, "motion collection payload truncated", path.string());
    }
    const double* p = c.payload.data() + offset;
    offset += n;
    return p;
  };
  for (const auto& rec : c.header.at("records")) {
    NamedMotion nm;
    nm.id = rec.at("id").get<std::string>();
    nm.motion.fps = rec.at("fps").get<double>();
    const auto t = rec.at("num_frames").get<std::size_t>();
    const auto nj = rec.at("num_joints").get<std::size_t>();
    nm.motion.frames.resize(t);
    const double* root = take(3 * t);
    for (std::size_t i = 0; i < t; ++i) {
      nm.motion.frames[i].rootPosition = Vec3(root[3 * i], root[3 * i + 1], root[3 * i + 2]);
    }
    const double* rots = take(6 * nj * t);
    for (std::size_t i = 0; i < t; ++i) {
      auto& r = nm.motion.frames[i].rotations;
      r.resize(nj);
      for (std::size_t j = 0; j < nj; ++j) {
        r[j] = decodeRot6d(Eigen::Map<const Vec6>(rots + 6 * (i * nj + j)));
      }
    }
    out.push_back(std::move(nm));
  }
  return out;
}

}  // namespace partmotion::motion
