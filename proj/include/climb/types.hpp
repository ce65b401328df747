#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace climb {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Vector3<double>;
using Mat3 = Matrix3<double>;
using Vec6 = Vector6<double>;
using Mat6 = Matrix6<double>;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Rigid pose of a frame in the world: position plus unit quaternion.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Mat3 rotation() const { return orientation.toRotationMatrix(); }
  Vec3 transform(const Vec3& local) const { return position + orientation * local; }
};

/// Cross-product matrix: skew(a) * b == a.cross(b).
template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> s;
  s << Scalar(0), -a(2), a(1),
       a(2), Scalar(0), -a(0),
       -a(1), a(0), Scalar(0);
  return s;
}

/// Quaternion for a rotation vector (axis * angle).
template <typename Derived>
Eigen::Quaternion<typename Derived::Scalar> exp_quat(const Eigen::MatrixBase<Derived>& rotvec) {
  using Scalar = typename Derived::Scalar;
  const Scalar angle = rotvec.norm();
  if (angle < Scalar(1e-12)) {
    Eigen::Quaternion<Scalar> q(Scalar(1), rotvec(0) / 2, rotvec(1) / 2, rotvec(2) / 2);
    return q.normalized();
  }
  return Eigen::Quaternion<Scalar>(Eigen::AngleAxis<Scalar>(angle, rotvec / angle));
}

/// Rotation vector of the quaternion `q` (shortest arc).
template <typename Scalar>
Vector3<Scalar> log_quat(const Eigen::Quaternion<Scalar>& q) {
  Eigen::Quaternion<Scalar> u = q.normalized();
  if (u.w() < Scalar(0)) u.coeffs() = -u.coeffs();
  const Scalar s = u.vec().norm();
  if (s < Scalar(1e-12)) return Scalar(2) * u.vec();
  return Scalar(2) * std::atan2(s, u.w()) * u.vec() / s;
}

}  // namespace climb
