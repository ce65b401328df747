#pragma once

#include <algorithm>
#include <cmath>

#include "climb/types.hpp"

namespace climb {

template <typename Scalar>
constexpr Scalar binomial(int n, int k) {
  Scalar r(1);
  for (int i = 1; i <= k; ++i) r = r * Scalar(n - k + i) / Scalar(i);
  return r;
}

/// Bernstein basis polynomial b_{j,n}(s) = C(n,j) (1-s)^(n-j) s^j.
template <typename Scalar>
Scalar bernstein(int n, int j, Scalar s) {
  using std::pow;
  return binomial<Scalar>(n, j) * pow(Scalar(1) - s, n - j) * pow(s, j);
}

/// Bezier curve of fixed degree over the time span [t0, tf].
template <typename Scalar, int Degree, int Dim = 3>
class BezierCurve {
 public:
  using Point = Eigen::Matrix<Scalar, Dim, 1>;
  using Controls = Eigen::Matrix<Scalar, Dim, Degree + 1>;

  BezierCurve() : controls_(Controls::Zero()), t0_(0), tf_(1) {}
  BezierCurve(const Controls& controls, Scalar t0, Scalar tf) : controls_(controls), t0_(t0), tf_(tf) {}

  const Controls& controls() const { return controls_; }
  Point control(int j) const { return controls_.col(j); }
  Scalar t0() const { return t0_; }
  Scalar tf() const { return tf_; }
  Scalar span() const { return tf_ - t0_; }

  /// Normalized parameter, clamped to [0, 1].
  Scalar parameter(Scalar t) const {
    const Scalar s = (t - t0_) / span();
    return s < Scalar(0) ? Scalar(0) : (s > Scalar(1) ? Scalar(1) : s);
  }

  Point position(Scalar t) const { return evaluate(controls_, parameter(t)); }

  Point velocity(Scalar t) const {
    Eigen::Matrix<Scalar, Dim, Degree> d;
    for (int j = 0; j < Degree; ++j) d.col(j) = Scalar(Degree) * (controls_.col(j + 1) - controls_.col(j));
    return evaluate(d, parameter(t)) / span();
  }

  Point acceleration(Scalar t) const {
    static_assert(Degree >= 2);
    Eigen::Matrix<Scalar, Dim, Degree - 1> d;
    for (int j = 0; j + 1 < Degree; ++j)
      d.col(j) = Scalar(Degree * (Degree - 1)) *
                 (controls_.col(j + 2) - Scalar(2) * controls_.col(j + 1) + controls_.col(j));
    return evaluate(d, parameter(t)) / (span() * span());
  }

 private:
  template <typename Derived>
  static Point evaluate(const Eigen::MatrixBase<Derived>& pts, Scalar s) {
    const int n = static_cast<int>(pts.cols()) - 1;
    Point p = Point::Zero();
    for (int j = 0; j <= n; ++j) p += bernstein<Scalar>(n, j, s) * pts.col(j);
    return p;
  }

  Controls controls_;
  Scalar t0_, tf_;
};

/// Degree-7 swing curve A_B0..A_B7.
using SwingTrajectory = BezierCurve<double, 7>;

/// Swing curve with A_B0..A_B2 at `start`, A_B5..A_B7 at `goal` (zero
/// velocity and acceleration at both ends) and free interior points.
template <typename Scalar>
BezierCurve<Scalar, 7> make_swing_curve(const Vector3<Scalar>& start, const Vector3<Scalar>& goal,
                                        const Vector3<Scalar>& a3, const Vector3<Scalar>& a4, Scalar t0,
                                        Scalar tf) {
  typename BezierCurve<Scalar, 7>::Controls c;
  c.col(0) = c.col(1) = c.col(2) = start;
  c.col(3) = a3;
  c.col(4) = a4;
  c.col(5) = c.col(6) = c.col(7) = goal;
  return BezierCurve<Scalar, 7>(c, t0, tf);
}

/// Rest-to-rest quintic 10s^3 - 15s^4 + 6s^5 and its first two derivatives in s.
template <typename Scalar>
Scalar quintic(Scalar s) {
  return s * s * s * (Scalar(10) + s * (Scalar(-15) + Scalar(6) * s));
}
template <typename Scalar>
Scalar quintic_d1(Scalar s) {
  return Scalar(30) * s * s * (Scalar(1) + s * (Scalar(-2) + s));
}
template <typename Scalar>
Scalar quintic_d2(Scalar s) {
  return Scalar(60) * s * (Scalar(1) + s * (Scalar(-3) + Scalar(2) * s));
}

/// Quintic rest-to-rest base motion between two poses; orientation follows
/// the geodesic (slerp) driven by the same quintic.
class PoseTrajectory {
 public:
  PoseTrajectory() = default;
  PoseTrajectory(const Pose& from, const Pose& to, double t0, double tf)
      : from_(from), to_(to), t0_(t0), tf_(tf), rotvec_(log_quat<double>(from.orientation.conjugate() * to.orientation)) {}

  double t0() const { return t0_; }
  double tf() const { return tf_; }

  Pose pose(double t) const {
    const double s = quintic(parameter(t));
    Pose p;
    p.position = from_.position + s * (to_.position - from_.position);
    p.orientation = (from_.orientation * exp_quat(s * rotvec_)).normalized();
    return p;
  }

  /// World linear and angular velocity.
  Vec6 twist(double t) const {
    const double sd = quintic_d1(parameter(t)) / (tf_ - t0_);
    Vec6 v;
    v.head<3>() = sd * (to_.position - from_.position);
    v.tail<3>() = sd * (from_.orientation * rotvec_);
    return v;
  }

  Vec6 acceleration(double t) const {
    const double sdd = quintic_d2(parameter(t)) / ((tf_ - t0_) * (tf_ - t0_));
    Vec6 a;
    a.head<3>() = sdd * (to_.position - from_.position);
    a.tail<3>() = sdd * (from_.orientation * rotvec_);
    return a;
  }

 private:
  double parameter(double t) const {
    if (tf_ <= t0_) return 1.0;
    return std::clamp((t - t0_) / (tf_ - t0_), 0.0, 1.0);
  }

  Pose from_, to_;
  double t0_ = 0.0, tf_ = 1.0;
  Vec3 rotvec_ = Vec3::Zero();
};

}  // namespace climb
