#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "builders.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/motion/features.hpp"
#include "partmotion/motion/io.hpp"
#include "partmotion/motion/normalizer.hpp"
#include "partmotion/motion/rotation.hpp"
#include "partmotion/motion/skeleton.hpp"
#include "partmotion/synth/generator.hpp"

using namespace partmotion;
using namespace partmotion::motion;
using std::numbers::pi;

namespace {

Mat3 randomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 axis(n(rng), n(rng), n(rng));
  std::uniform_real_distribution<double> ang(-pi, pi);
  return axisAngle(axis.normalized(), ang(rng));
}

MotionSequence standing(std::size_t T, const Skeleton& skel) {
  MotionSequence m;
  m.fps = 20.0;
  m.frames.assign(T, restPose(skel, Vec3(0, 0, 0.95)));
  return m;
}

}  // namespace

TEST_SUITE("motion") {
  TEST_CASE("6D codec examples") {
    const Vec6 id = encodeRot6d(Mat3::Identity());
    CHECK(id == (Vec6() << 1, 0, 0, 0, 1, 0).finished());
    CHECK(decodeRot6d(id).isApprox(Mat3::Identity(), 1e-12));

    // Columns of Rz(90°) are (0,1,0) and (-1,0,0).
    const Vec6 z90 = encodeRot6d(rotationZ(pi / 2));
    const Vec6 expected = (Vec6() << 0, 1, 0, -1, 0, 0).finished();
    CHECK((z90 - expected).norm() < 1e-12);

    CHECK(decodeRot6d(2.0 * id).isApprox(Mat3::Identity(), 1e-12));
  }

  TEST_CASE("6D decode is a proper rotation for arbitrary input") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int i = 0; i < 1000; ++i) {
      Vec6 v;
      for (int k = 0; k < 6; ++k) {
        v[k] = n(rng);
      }
      const Mat3 r = decodeRot6d(v);
      CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-6);
      CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-6));
      const Mat3 q = randomRotation(rng);
      CHECK((decodeRot6d(encodeRot6d(q)) - q).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("degenerate 6D input") {
    Vec6 zero = Vec6::Zero();
    CHECK_THROWS_AS(decodeRot6d(zero), Error);
    Vec6 parallel;
    parallel << 1, 0, 0, 2, 0, 0;
    try {
      decodeRot6d(parallel);
      FAIL("expected DEGENERATE_6D");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerate6d);
    }
  }

  TEST_CASE("angle wrapping lands in (-pi, pi]") {
    CHECK(wrapAngle(pi) == doctest::Approx(pi));
    CHECK(wrapAngle(-pi) == doctest::Approx(pi));
    CHECK(wrapAngle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(wrapAngle(0.25) == doctest::Approx(0.25));
  }

  TEST_CASE("forward kinematics on a chain") {
    const auto skel = testutil::chainSkeleton();
    Pose pose;
    pose.rotations.assign(3, Mat3::Identity());
    auto j = forwardKinematics(skel, pose);
    CHECK(j[1].isApprox(Vec3(1, 0, 0)));
    CHECK(j[2].isApprox(Vec3(2, 0, 0)));

    pose.rootPosition = Vec3(1, 0, 0);
    j = forwardKinematics(skel, pose);
    CHECK(j[0].isApprox(Vec3(1, 0, 0)));
    CHECK(j[2].isApprox(Vec3(3, 0, 0)));

    pose.rootPosition = Vec3::Zero();
    pose.rotations[0] = rotationZ(pi / 2);
    j = forwardKinematics(skel, pose);
    CHECK((j[1] - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK((j[2] - Vec3(0, 2, 0)).norm() < 1e-12);
  }

  TEST_CASE("toy skeleton dimensions and part coverage") {
    const auto& skel = toySkeleton();
    CHECK(skel.numJoints() == 13);
    CHECK(featureDim(skel.numJoints()) == 121);
    CHECK_NOTHROW(skel.validate());
    for (auto p : annotation::kAllParts) {
      if (p == annotation::PartId::kTrajectory) {
        CHECK(skel.jointsOf(p).empty());
      } else {
        CHECK_FALSE(skel.jointsOf(p).empty());
      }
    }
    const auto back = skeletonFromJson(skeletonToJson(skel));
    CHECK(back.parents == skel.parents);
    CHECK(back.partOf == skel.partOf);
  }

  TEST_CASE("canonicalization removes yaw and xy") {
    const auto& skel = toySkeleton();
    Pose p = restPose(skel, Vec3(0, 0, 0.95));
    const auto base = canonicalizeFrame(skel, p);
    CHECK(base.yaw == doctest::Approx(0.0));
    CHECK(base.residual.isApprox(Mat3::Identity()));

    Pose q = p;
    q.rotations[0] = rotationZ(pi / 6) * p.rotations[0];
    q.rootPosition = Vec3(3, -2, 0.95);
    const auto moved = canonicalizeFrame(skel, q);
    CHECK(moved.yaw == doctest::Approx(pi / 6));
    CHECK((moved.residual - base.residual).norm() < 1e-12);
    for (std::size_t j = 0; j < base.joints.size(); ++j) {
      CHECK((moved.joints[j] - base.joints[j]).norm() < 1e-12);
    }
  }

  TEST_CASE("vertical forward axis is a singular heading") {
    Mat3 up = axisAngle(Vec3(0, 1, 0), -pi / 2);  // maps +X to +Z
    try {
      headingYaw(up);
      FAIL("expected SINGULAR_HEADING");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSingularHeading);
    }
  }

  TEST_CASE("velocity columns follow forward differences") {
    const auto& skel = toySkeleton();
    auto m = standing(20, skel);
    auto f = encodeFeatures(m, skel);
    for (std::size_t t = 0; t < 20; ++t) {
      CHECK(f.values(t, FeatureLayout::kVelX) == 0.0);
      CHECK(f.values(t, FeatureLayout::kVelY) == 0.0);
      CHECK(f.values(t, FeatureLayout::kYawRate) == 0.0);
    }

    for (std::size_t t = 0; t < 20; ++t) {
      m.frames[t].rootPosition.x() = 0.05 * static_cast<double>(t);
    }
    f = encodeFeatures(m, skel);
    for (std::size_t t = 0; t < 20; ++t) {
      CHECK(f.values(t, FeatureLayout::kVelX) == doctest::Approx(1.0));
    }

    auto turning = standing(20, skel);
    for (std::size_t t = 0; t < 20; ++t) {
      turning.frames[t].rotations[0] = rotationZ(pi / 40 * static_cast<double>(t));
    }
    f = encodeFeatures(turning, skel);
    for (std::size_t t = 0; t < 20; ++t) {
      CHECK(f.values(t, FeatureLayout::kYawRate) == doctest::Approx(pi / 2));
    }
  }

  TEST_CASE("decoding integrates velocities") {
    const auto& skel = toySkeleton();
    auto f = encodeFeatures(standing(20, skel), skel);
    auto still = decodeFeatures(f, skel);
    for (const auto& fr : still.motion.frames) {
      CHECK(fr.rootPosition.head<2>().norm() < 1e-12);
    }
    for (std::size_t t = 0; t < 20; ++t) {
      f.values(t, FeatureLayout::kVelX) = 1.0;
    }
    const auto moving = decodeFeatures(f, skel);
    CHECK(moving.motion.frames.back().rootPosition.x() == doctest::Approx(0.95));
  }

  TEST_CASE("encode then decode reproduces synthetic motion") {
    const auto& skel = toySkeleton();
    const auto data = synth::synthesizeDataset(synth::defaultLibrary(), {}, 10, 21);
    for (const auto& s : data) {
      const auto& m = s.motion;
      const auto f = encodeFeatures(m, skel);
      const Vec2 xy = m.frames[0].rootPosition.head<2>();
      const double yaw = headingYaw(m.frames[0].rotations[0]);
      const auto back = decodeFeatures(f, skel, xy, yaw);
      double worst = 0.0;
      for (std::size_t t = 0; t < m.numFrames(); ++t) {
        const auto a = forwardKinematics(skel, m.frames[t]);
        const auto b = forwardKinematics(skel, back.motion.frames[t]);
        for (std::size_t j = 0; j < a.size(); ++j) {
          worst = std::max(worst, (a[j] - b[j]).norm());
        }
      }
      CHECK(worst <= 1e-4);
    }
  }

  TEST_CASE("features are invariant to yaw and planar translation") {
    const auto& skel = toySkeleton();
    const auto s = synth::synthesizeDataset(synth::defaultLibrary(), {}, 1, 4)[0];
    const auto f = encodeFeatures(s.motion, skel);
    const auto g = encodeFeatures(rotateAboutZ(s.motion, 1.234, Vec2(5.0, -3.0)), skel);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      worst = std::max(worst, std::abs(f.values.values()[i] - g.values.values()[i]));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("encoding needs two frames") {
    CHECK_THROWS_AS(encodeFeatures(standing(1, toySkeleton()), toySkeleton()), Error);
  }

  TEST_CASE("normalizer statistics and round-trip") {
    nn::Mat a(4, 3);
    for (std::size_t r = 0; r < 4; ++r) {
      a(r, 0) = static_cast<double>(r);  // mean 1.5, population sd sqrt(1.25)
      a(r, 1) = 7.0;                     // constant
      a(r, 2) = r % 2 ? 1.0 : -1.0;
    }
    const auto norm = FeatureNormalizer::fit({&a});
    CHECK(norm.mean[0] == doctest::Approx(1.5));
    CHECK(norm.stddev[0] == doctest::Approx(std::sqrt(1.25)));
    CHECK(norm.stddev[1] == doctest::Approx(1e-4));
    nn::Mat b = a;
    norm.apply(b);
    double m0 = 0, v0 = 0;
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(b(r, 1) == 0.0);
      m0 += b(r, 0) / 4;
    }
    for (std::size_t r = 0; r < 4; ++r) {
      v0 += (b(r, 0) - m0) * (b(r, 0) - m0) / 4;
    }
    CHECK(m0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v0 == doctest::Approx(1.0));
    norm.invert(b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a.values()[i] - b.values()[i]) < 1e-6);
    }
    const auto loaded = FeatureNormalizer::fromJson(norm.toJson());
    CHECK(loaded.mean == norm.mean);
    CHECK(loaded.stddev == norm.stddev);
  }

  TEST_CASE("motion JSON and collection round-trip") {
    const auto& skel = toySkeleton();
    const auto s = synth::synthesizeDataset(synth::defaultLibrary(), {}, 2, 8);
    const auto tmp = std::filesystem::temp_directory_path();
    saveMotion(tmp / "pm_motion_test.json", s[0].motion, skel.name);
    const auto back = loadMotion(tmp / "pm_motion_test.json", skel.numJoints());
    REQUIRE(back.numFrames() == s[0].motion.numFrames());
    double worst = 0.0;
    for (std::size_t t = 0; t < back.numFrames(); ++t) {
      worst = std::max(worst, (back.frames[t].rootPosition - s[0].motion.frames[t].rootPosition).norm());
      for (std::size_t j = 0; j < skel.numJoints(); ++j) {
        worst = std::max(worst, (back.frames[t].rotations[j] - s[0].motion.frames[t].rotations[j]).norm());
      }
    }
    CHECK(worst < 1e-9);

    saveMotionCollection(tmp / "pm_motion_test.pmm", {{"a", s[0].motion}, {"b", s[1].motion}}, skel.name);
    const auto coll = loadMotionCollection(tmp / "pm_motion_test.pmm");
    REQUIRE(coll.size() == 2);
    CHECK(coll[1].id == "b");
    CHECK(coll[1].motion.frames.back().rootPosition == s[1].motion.frames.back().rootPosition);
    std::filesystem::remove(tmp / "pm_motion_test.json");
    std::filesystem::remove(tmp / "pm_motion_test.pmm");
  }
}
