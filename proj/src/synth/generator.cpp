#include "partmotion/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "partmotion/common/error.hpp"
#include "partmotion/motion/features.hpp"

namespace partmotion::synth {
namespace {

using motion::Mat3;
using motion::Vec3;
using motion::Vec6;

std::uint64_t substream(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

// Splits [0, T) into `count` windows of at least minLen frames.
std::vector<int> cutPoints(int t, int count, int minLen, std::mt19937_64& rng) {
  const int slack = t - count * minLen;
  std::vector<int> extra(static_cast<std::size_t>(count - 1));
  for (int& e : extra) {
    e = std::uniform_int_distribution<int>(0, slack)(rng);
  }
  std::sort(extra.begin(), extra.end());
  std::vector<int> cuts{0};
  for (int i = 0; i < count - 1; ++i) {
    cuts.push_back((i + 1) * minLen + extra[static_cast<std::size_t>(i)]);
  }
  cuts.push_back(t);
  return cuts;
}

// Blended per-part contribution at a frame, including the crossfade from
// the previous instance of the same track.
PartPose partPoseAt(const Library& lib, const std::vector<AtomicInstance>& track, PartId part, int frame, double fps) {
  std::size_t k = 0;
  while (k + 1 < track.size() && frame >= track[k].end) {
    ++k;
  }
  PartPose cur = evaluateAtomic(lib, track[k], part, frame, fps);
  const int sinceStart = frame - track[k].start;
  if (k == 0 || sinceStart >= kCrossfadeFrames) {
    return cur;
  }
  const PartPose prev = evaluateAtomic(lib, track[k - 1], part, frame, fps);
  const double w = static_cast<double>(sinceStart + 1) / (kCrossfadeFrames + 1);
  PartPose out;
  out.forwardSpeed = (1 - w) * prev.forwardSpeed + w * cur.forwardSpeed;
  out.yawRate = (1 - w) * prev.yawRate + w * cur.yawRate;
  out.rootDrop = (1 - w) * prev.rootDrop + w * cur.rootDrop;
  // Joints touched by either side; identity stands in for an absent one.
  std::vector<int> joints;
  for (const auto& [j, r] : prev.rotations) {
    joints.push_back(j);
  }
  for (const auto& [j, r] : cur.rotations) {
    joints.push_back(j);
  }
  std::sort(joints.begin(), joints.end());
  joints.erase(std::unique(joints.begin(), joints.end()), joints.end());
  auto find = [](const PartPose& p, int j) -> Mat3 {
    for (const auto& [jj, r] : p.rotations) {
      if (jj == j) {
        return r;
      }
    }
    return Mat3::Identity();
  };
  for (int j : joints) {
    const Vec6 blended = (1 - w) * motion::encodeRot6d(find(prev, j)) + w * motion::encodeRot6d(find(cur, j));
    out.rotations.push_back({j, motion::decodeRot6d(blended)});
  }
  return out;
}

}  // namespace

motion::MotionSequence renderInstances(const Library& lib,
                                       const std::array<std::vector<AtomicInstance>, annotation::kNumParts>& instances,
                                       int numFrames, double fps) {
  const auto& skel = motion::toySkeleton();
  motion::MotionSequence m;
  m.fps = fps;
  double yaw = 0.0;
  Vec3 pos(0.0, 0.0, 0.0);
  const double standing = 0.95;
  for (int f = 0; f < numFrames; ++f) {
    motion::Pose pose = motion::restPose(skel);
    double speed = 0.0, yawRate = 0.0, drop = 0.0;
    int dropVotes = 0;
    for (auto part : annotation::kAllParts) {
      const auto& track = instances[annotation::index(part)];
      if (track.empty()) {
        continue;
      }
      const PartPose pp = partPoseAt(lib, track, part, f, fps);
      for (const auto& [j, r] : pp.rotations) {
        pose.rotations[static_cast<std::size_t>(j)] = r;
      }
      speed += pp.forwardSpeed;
      yawRate += pp.yawRate;
      if (part == PartId::kLeftLeg || part == PartId::kRightLeg) {
        drop += pp.rootDrop;
        ++dropVotes;
      }
    }
    if (dropVotes > 0) {
      drop /= dropVotes;
    }
    pose.rotations[0] = motion::rotationZ(yaw);
    pose.rootPosition = Vec3(pos.x(), pos.y(), standing - drop);
    m.frames.push_back(std::move(pose));
    pos += motion::rotationZ(yaw) * Vec3(speed / fps, 0.0, 0.0);
    yaw = motion::wrapAngle(yaw + yawRate / fps);
  }
  return m;
}

SynthSample synthesizeSample(const Library& lib, const SynthConfig& cfg, std::mt19937_64& rng, const std::string& id) {
  if (cfg.minFrames < cfg.minWindowFrames || cfg.maxFrames < cfg.minFrames || cfg.maxWindows < 1 || cfg.fps <= 0) {
    throw Error(ErrorCode::kConfig, "invalid synthesis config");
  }
  const int t = std::uniform_int_distribution<int>(cfg.minFrames, cfg.maxFrames)(rng);
  const int maxWindows = std::max(1, std::min(cfg.maxWindows, t / cfg.minWindowFrames));
  const int windows = std::uniform_int_distribution<int>(1, maxWindows)(rng);
  const auto cuts = cutPoints(t, windows, cfg.minWindowFrames, rng);

  SynthSample s;
  auto& ann = s.annotation;
  ann.id = id;
  ann.numFrames = t;
  ann.fps = cfg.fps;
  std::string sentence = "a person ";
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<annotation::Track, annotation::kNumParts> rawTracks;
  for (int w = 0; w < windows; ++w) {
    const int ws = cuts[static_cast<std::size_t>(w)];
    const int we = cuts[static_cast<std::size_t>(w) + 1];
    const auto& tmpl = pick(lib.templates, rng);
    ann.actions.push_back({annotation::Label(pick(tmpl.actionLabels, rng)), ws, we});
    sentence += (w == 0 ? "" : ", then ") + tmpl.phrase;
    for (const auto& name : tmpl.atomics) {
      const int ai = lib.atomicIndex(name);
      const auto& def = lib.atomics[static_cast<std::size_t>(ai)];
      AtomicInstance inst;
      inst.atomic = ai;
      inst.amplitude = std::uniform_real_distribution<double>(def.minAmplitude, def.maxAmplitude)(rng);
      inst.start = ws;
      inst.end = we;
      const int len = we - ws;
      if (unit(rng) < cfg.asyncProbability && len - def.minFrames >= 4) {
        const int slack = (len - def.minFrames) / 2;
        inst.start = ws + std::uniform_int_distribution<int>(0, slack)(rng);
        inst.end = we - std::uniform_int_distribution<int>(0, slack)(rng);
      }
      const std::string label = pick(def.labels, rng);
      for (PartId p : def.parts) {
        rawTracks[annotation::index(p)].push_back({annotation::Label(label), inst.start, inst.end});
        s.instances[annotation::index(p)].push_back(inst);
      }
    }
  }
  ann.sequence = {{annotation::Label(sentence), 0, t}};
  for (auto part : annotation::kAllParts) {
    const auto k = annotation::index(part);
    ann.parts[k] = annotation::fillTrackGaps(rawTracks[k], t, annotation::partKey(part));
    // Align instances with the filled track: idle instances fill the gaps.
    std::vector<AtomicInstance> aligned;
    std::size_t next = 0;
    for (const auto& seg : ann.parts[k]) {
      if (seg.label.isUnknown()) {
        aligned.push_back({-1, 0.0, seg.start, seg.end});
      } else {
        aligned.push_back(s.instances[k][next++]);
      }
    }
    s.instances[k] = std::move(aligned);
  }
  s.motion = renderInstances(lib, s.instances, t, cfg.fps);
  return s;
}

std::vector<SynthSample> synthesizeDataset(const Library& lib, const SynthConfig& cfg, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<SynthSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(substream(seed, i));
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%06zu", i);
    out.push_back(synthesizeSample(lib, cfg, rng, id));
  }
  return out;
}

annotation::HierarchicalAnnotation sparsifyLabels(const annotation::HierarchicalAnnotation& ann, double q,
                                                  std::mt19937_64& rng, std::size_t* dropped, std::size_t* labeled) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kConfig, "sparsify rate must be in [0, 1)");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  annotation::HierarchicalAnnotation out = ann;
  std::size_t d = 0, l = 0;
  for (auto& track : out.parts) {
    for (auto& seg : track) {
      if (seg.label.isUnknown()) {
        continue;
      }
      ++l;
      if (unit(rng) < q) {
        seg.label = annotation::Label::unknown();
        ++d;
      }
    }
  }
  if (dropped != nullptr) {
    *dropped = d;
  }
  if (labeled != nullptr) {
    *labeled = l;
  }
  return out;
}

double partActivity(const motion::MotionSequence& m, const motion::Skeleton& skel, PartId part, int start, int end) {
  if (start < 0 || end > static_cast<int>(m.numFrames()) || start >= end) {
    throw Error(ErrorCode::kTimeOutOfRange, "activity window outside the motion");
  }
  double best = 0.0;
  if (part == PartId::kTrajectory) {
    const auto& a = m.frames[static_cast<std::size_t>(start)];
    for (int f = start; f < end; ++f) {
      const auto& b = m.frames[static_cast<std::size_t>(f)];
      const double planar = (b.rootPosition - a.rootPosition).head<2>().norm();
      const double yaw = std::abs(motion::wrapAngle(motion::headingYaw(b.rotations[0]) - motion::headingYaw(a.rotations[0])));
      best = std::max({best, planar, yaw});
    }
    return best;
  }
  for (int j : skel.jointsOf(part)) {
    if (j == 0) {
      continue;
    }
    for (int f = start; f < end; ++f) {
      const Mat3& r = m.frames[static_cast<std::size_t>(f)].rotations[static_cast<std::size_t>(j)];
      best = std::max(best, motion::rotationAngleBetween(r, Mat3::Identity()));
    }
  }
  return best;
}

double elbowHeightGain(const motion::MotionSequence& m, const motion::Skeleton& skel, bool left) {
  const int elbow = skel.jointIndex(left ? "left_elbow" : "right_elbow");
  const std::size_t n = m.numFrames();
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  if (elbow < 0 || n < 2) {
    throw Error(ErrorCode::kConfig, "elbow height needs an elbow joint and two frames");
  }
  auto meanHeight = [&](std::size_t from, std::size_t to) {
    double sum = 0.0;
    for (std::size_t f = from; f < to; ++f) {
      sum += motion::forwardKinematics(skel, m.frames[f])[static_cast<std::size_t>(elbow)].z();
    }
    return sum / static_cast<double>(to - from);
  };
  return meanHeight(n - q, n) - meanHeight(0, q);
}

}  // namespace partmotion::synth
