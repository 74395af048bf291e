#include "actrec/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "actrec/error.hpp"

namespace actrec {

namespace {

constexpr double kRotationTolerance = 1e-6;

}  // namespace

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Mat3 Quaternion::to_matrix() const {
  const double n = norm();
  const double qw = w / n, qx = x / n, qy = y / n, qz = z / n;
  Mat3 r;
  r << 1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw),
       2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
       2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy);
  return r;
}

double Quaternion::angle() const { return 2.0 * std::acos(std::clamp(std::abs(w), 0.0, 1.0)); }

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Quaternion canonicalize(Quaternion q) {
  bool flip = q.w < 0.0;
  if (q.w == 0.0) {
    if (q.x != 0.0) {
      flip = q.x < 0.0;
    } else if (q.y != 0.0) {
      flip = q.y < 0.0;
    } else {
      flip = q.z < 0.0;
    }
  }
  if (flip) {
    q.w = -q.w;
    q.x = -q.x;
    q.y = -q.y;
    q.z = -q.z;
  }
  // -0.0 compares equal to 0.0 but prints with a sign; keep output clean.
  q.w += 0.0;
  q.x += 0.0;
  q.y += 0.0;
  q.z += 0.0;
  return q;
}

bool is_halfspace(const Quaternion& q) {
  if (q.w > 0.0) return true;
  if (q.w < 0.0) return false;
  if (q.x != 0.0) return q.x > 0.0;
  if (q.y != 0.0) return q.y > 0.0;
  return q.z >= 0.0;
}

Quaternion to_halfspace_quaternion(const Mat3& r) {
  if (!r.allFinite() || orthonormality_error(r) > kRotationTolerance ||
      std::abs(r.determinant() - 1.0) > kRotationTolerance) {
    std::ostringstream msg;
    msg << "matrix is not a proper rotation (orthonormality error "
        << orthonormality_error(r) << ", det " << r.determinant() << ")";
    throw Error(ErrorCode::InvalidRotation, msg.str());
  }

  // Shepperd's method: pivot on the largest of (trace, diagonal) for stability.
  Quaternion q;
  const double trace = r(0, 0) + r(1, 1) + r(2, 2);
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(trace + 1.0);
    q.w = 0.25 * s;
    q.x = (r(2, 1) - r(1, 2)) / s;
    q.y = (r(0, 2) - r(2, 0)) / s;
    q.z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (r(0, 1) + r(1, 0)) / s;
    q.z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.x = (r(0, 1) + r(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.x = (r(0, 2) + r(2, 0)) / s;
    q.y = (r(1, 2) + r(2, 1)) / s;
    q.z = 0.25 * s;
  }
  const double n = q.norm();
  q.w /= n;
  q.x /= n;
  q.y /= n;
  q.z /= n;
  return canonicalize(q);
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace actrec
