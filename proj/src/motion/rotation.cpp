#include "partmotion/motion/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "partmotion/common/error.hpp"

namespace partmotion::motion {

namespace {
constexpr double kMinNorm = 1e-8;
}

Vec6 encodeRot6d(const Mat3& rotation) {
  Vec6 out;
  out.head<3>() = rotation.col(0);
  out.tail<3>() = rotation.col(1);
  return out;
}

Mat3 decodeRot6d(const Vec6& sixd) {
  const Vec3 a = sixd.head<3>();
  const Vec3 b = sixd.tail<3>();
  const double na = a.norm();
  if (na < kMinNorm) {
    throw Error(ErrorCode::kDegenerate6d, "first column has near-zero norm");
  }
  const Vec3 c0 = a / na;
  const Vec3 ortho = b - c0.dot(b) * c0;
  const double nb = ortho.norm();
  if (nb < kMinNorm) {
    throw Error(ErrorCode::kDegenerate6d, "second column is parallel to the first");
  }
  const Vec3 c1 = ortho / nb;
  Mat3 r;
  r.col(0) = c0;
  r.col(1) = c1;
  r.col(2) = c0.cross(c1);
  return r;
}

Mat3 rotationZ(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 axisAngle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

double wrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle, kTwoPi);
  if (w <= -std::numbers::pi) {
    w += kTwoPi;
  } else if (w > std::numbers::pi) {
    w -= kTwoPi;
  }
  return w;
}

double rotationAngleBetween(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace partmotion::motion
