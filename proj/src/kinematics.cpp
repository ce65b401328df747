#include "climb/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "climb/error.hpp"

namespace climb {

namespace {

// Rotation about a unit axis; hot enough to avoid AngleAxis overhead.
Mat3 axis_rotation(const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  Mat3 r;
  r << c + x * x * v, x * y * v - z * s, x * z * v + y * s,
       y * x * v + z * s, c + y * y * v, y * z * v - x * s,
       z * x * v - y * s, z * y * v + x * s, c + z * z * v;
  return r;
}

}  // namespace

LimbFrames limb_frames(const RobotModel& model, const Pose& base, int limb,
                       const Eigen::Ref<const VecX>& q_limb) {
  const LimbModel& lm = model.limbs.at(limb);
  const int k = lm.dof();
  LimbFrames f;
  f.joint_origin.resize(k);
  f.joint_axis.resize(k);
  f.link_rotation.resize(k);
  f.link_com.resize(k);

  Mat3 rot = base.rotation() * lm.mount_rotation;
  Vec3 origin = base.transform(lm.mount_position);
  for (int j = 0; j < k; ++j) {
    const JointModel& jt = lm.joints[j];
    f.joint_axis[j] = rot * jt.axis;
    rot = rot * axis_rotation(jt.axis, q_limb[j]);
    f.joint_origin[j] = origin;
    f.link_rotation[j] = rot;
    const Vec3 link = rot * jt.link;
    f.link_com[j] = origin + jt.com_ratio * link;
    origin += link;
  }
  f.tip = origin;
  f.tip_rotation = rot;
  return f;
}

Vec3 foot_position(const RobotModel& model, const Pose& base, int limb,
                   const Eigen::Ref<const VecX>& q_limb) {
  const LimbModel& lm = model.limbs[limb];
  Mat3 rot = base.rotation() * lm.mount_rotation;
  Vec3 p = base.transform(lm.mount_position);
  for (int j = 0; j < lm.dof(); ++j) {
    rot = rot * axis_rotation(lm.joints[j].axis, q_limb[j]);
    p += rot * lm.joints[j].link;
  }
  return p;
}

Pose forward_kinematics(const RobotModel& model, const RobotState& state, int limb) {
  const LimbFrames f = limb_frames(model, state.base, limb, state.limb_q(model, limb));
  Pose pose;
  pose.position = f.tip;
  pose.orientation = Quat(f.tip_rotation).normalized();
  return pose;
}

LimbJacobians limb_jacobians(const RobotModel& model, const Pose& base, int limb,
                             const Eigen::Ref<const VecX>& q_limb) {
  const LimbFrames f = limb_frames(model, base, limb, q_limb);
  const int k = model.limb_dof(limb);
  LimbJacobians jac;
  jac.joint.resize(6, k);
  for (int j = 0; j < k; ++j) {
    jac.joint.col(j).head<3>() = f.joint_axis[j].cross(f.tip - f.joint_origin[j]);
    jac.joint.col(j).tail<3>() = f.joint_axis[j];
  }
  jac.base.setIdentity();
  jac.base.topRightCorner<3, 3>() = -skew(f.tip - base.position);
  return jac;
}

LimbJacobians limb_jacobians(const RobotModel& model, const RobotState& state, int limb) {
  return limb_jacobians(model, state.base, limb, state.limb_q(model, limb));
}

Mat3X translational_jacobian(const RobotModel& model, const Pose& base, int limb,
                             const Eigen::Ref<const VecX>& q_limb) {
  const LimbModel& lm = model.limbs[limb];
  const int k = lm.dof();
  Mat3 rot = base.rotation() * lm.mount_rotation;
  Vec3 p = base.transform(lm.mount_position);
  Mat3X axes(3, k), origins(3, k);
  for (int j = 0; j < k; ++j) {
    axes.col(j) = rot * lm.joints[j].axis;
    origins.col(j) = p;
    rot = rot * axis_rotation(lm.joints[j].axis, q_limb[j]);
    p += rot * lm.joints[j].link;
  }
  Mat3X jac(3, k);
  for (int j = 0; j < k; ++j) jac.col(j) = axes.col(j).cross(p - origins.col(j));
  return jac;
}

double manipulability(const RobotModel& model, const Pose& base, int limb,
                      const Eigen::Ref<const VecX>& q_limb) {
  const Mat3X jac = translational_jacobian(model, base, limb, q_limb);
  if (jac.cols() == 3) return std::abs(Mat3(jac).determinant());
  const VecX sv = Eigen::JacobiSVD<MatX>(jac).singularValues();
  const int n = std::min<int>(3, static_cast<int>(jac.cols()));
  double w = 1.0;
  for (int i = 0; i < n; ++i) w *= sv[i];
  return w;
}

double manipulability(const RobotModel& model, const RobotState& state, int limb) {
  return manipulability(model, state.base, limb, state.limb_q(model, limb));
}

MatX pseudo_inverse(const Eigen::Ref<const MatX>& m, double threshold) {
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VecX inv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > threshold ? 1.0 / inv[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

// Damped least squares from one seed, joints clamped to their limits.
IkResult descend(const RobotModel& model, const Pose& base, int limb, const Vec3& target, VecX q,
                 const IkOptions& options) {
  const LimbModel& lm = model.limbs[limb];
  IkResult res;
  res.q = std::move(q);
  for (int j = 0; j < lm.dof(); ++j) res.q[j] = std::clamp(res.q[j], lm.joints[j].lower, lm.joints[j].upper);

  const double lambda2 = options.damping * options.damping;
  Vec3 err = target - foot_position(model, base, limb, res.q);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (err.norm() <= options.tolerance) break;
    const Mat3X jac = translational_jacobian(model, base, limb, res.q);
    const Mat3 jjt = jac * jac.transpose() + lambda2 * Mat3::Identity();
    VecX next = res.q + jac.transpose() * jjt.ldlt().solve(err);
    for (int j = 0; j < lm.dof(); ++j) next[j] = std::clamp(next[j], lm.joints[j].lower, lm.joints[j].upper);
    if ((next - res.q).norm() < 1e-15) break;   // stalled on a limit
    res.q = next;
    err = target - foot_position(model, base, limb, res.q);
  }
  res.residual = err.norm();
  return res;
}

}  // namespace

IkResult solve_ik(const RobotModel& model, const Pose& base, int limb, const Vec3& target,
                  const Eigen::Ref<const VecX>& seed, const IkOptions& options) {
  const LimbModel& lm = model.limbs.at(limb);
  const int k = lm.dof();
  IkResult res = descend(model, base, limb, target, seed, options);
  // The descent is local; a clamped joint can trap it. Retry from fixed interior seeds.
  for (double f : {0.5, 0.25, 0.75}) {
    if (res.residual <= 1e-7) break;
    for (int first : {0, 1}) {
      VecX s(k);
      for (int j = 0; j < k; ++j) {
        const JointModel& jt = lm.joints[j];
        s[j] = jt.lower + (j == 0 && first ? 1.0 - f : f) * (jt.upper - jt.lower);
      }
      IkResult r = descend(model, base, limb, target, s, options);
      r.iterations += res.iterations;
      if (r.residual < res.residual) res = r;
      if (res.residual <= 1e-7) break;
    }
  }
  if (res.residual <= 1e-7) return res;

  const Vec3 root = base.transform(lm.mount_position);
  bool at_limit = false;
  for (int j = 0; j < k; ++j)
    at_limit |= res.q[j] <= lm.joints[j].lower + 1e-9 || res.q[j] >= lm.joints[j].upper - 1e-9;
  res.status = (target - root).norm() > lm.reach() || !at_limit ? IkStatus::unreachable
                                                              : IkStatus::limit_violation;
  return res;
}

VecX inverse_kinematics(const RobotModel& model, const Pose& base, int limb, const Vec3& target) {
  const IkResult r = solve_ik(model, base, limb, target, model.limbs.at(limb).home);
  if (r.status == IkStatus::unreachable)
    throw Error(Errc::unreachable, "limb " + std::to_string(limb) + " cannot reach target");
  if (r.status == IkStatus::limit_violation)
    throw Error(Errc::limit_violation, "limb " + std::to_string(limb) + " target needs joints beyond limits");
  return r.q;
}

}  // namespace climb
