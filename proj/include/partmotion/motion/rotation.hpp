#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace partmotion::motion {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

// First two columns of the rotation matrix, column-major: [c0; c1].
Vec6 encodeRot6d(const Mat3& rotation);

// Gram-Schmidt reconstruction. Throws Error(kDegenerate6d) when either
// normalization would divide by less than 1e-8.
Mat3 decodeRot6d(const Vec6& sixd);

Mat3 rotationZ(double angle);
Mat3 axisAngle(const Vec3& axis, double angle);

// Wraps into (-pi, pi].
double wrapAngle(double angle);

// Angle of the relative rotation a^T b, in [0, pi].
double rotationAngleBetween(const Mat3& a, const Mat3& b);

}  // namespace partmotion::motion
