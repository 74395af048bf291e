#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

namespace actrec {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Unit quaternion stored as (w, x, y, z).
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  Mat3 to_matrix() const;
  /// Rotation angle in [0, pi] for a half-space quaternion.
  double angle() const;
};

/// Max-abs entry of R^T R - I.
double orthonormality_error(const Mat3& r);

/// Nearest rotation in the Frobenius sense (polar factor via SVD), det forced to +1.
Mat3 nearest_rotation(const Mat3& m);

/// Converts a rotation matrix to the half-space quaternion: w >= 0, and when
/// w == 0 the first nonzero of (x, y, z) is positive.
/// Throws Error(InvalidRotation) when R is not orthonormal within 1e-6 or det != +1.
Quaternion to_halfspace_quaternion(const Mat3& r);

/// Applies the half-space sign rule to an arbitrary unit quaternion.
Quaternion canonicalize(Quaternion q);

bool is_halfspace(const Quaternion& q);

Mat3 axis_angle(const Vec3& axis, double angle);

/// Reflection across the x = 0 plane, diag(-1, 1, 1).
inline Mat3 x_reflection() {
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1.0;
  return m;
}

}  // namespace actrec
