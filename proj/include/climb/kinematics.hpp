#pragma once

#include <vector>

#include "climb/robot_model.hpp"
#include "climb/types.hpp"

namespace climb {

/// World-frame geometry of one limb at a configuration.
struct LimbFrames {
  std::vector<Vec3> joint_origin;   // o_j
  std::vector<Vec3> joint_axis;     // z_j, world
  std::vector<Mat3> link_rotation;  // frame of link j
  std::vector<Vec3> link_com;
  Vec3 tip = Vec3::Zero();
  Mat3 tip_rotation = Mat3::Identity();
};

LimbFrames limb_frames(const RobotModel& model, const Pose& base, int limb,
                       const Eigen::Ref<const VecX>& q_limb);

/// Gripper position only; the hot path of IK and trajectory sampling.
Vec3 foot_position(const RobotModel& model, const Pose& base, int limb,
                   const Eigen::Ref<const VecX>& q_limb);

Pose forward_kinematics(const RobotModel& model, const RobotState& state, int limb);

/// J_m maps limb joint rates to gripper twist (linear; angular), J_b maps the
/// base twist to gripper twist with joints frozen.
struct LimbJacobians {
  Mat6X joint;
  Mat6 base;
};

LimbJacobians limb_jacobians(const RobotModel& model, const Pose& base, int limb,
                             const Eigen::Ref<const VecX>& q_limb);
LimbJacobians limb_jacobians(const RobotModel& model, const RobotState& state, int limb);

/// Translational rows of J_m only.
Mat3X translational_jacobian(const RobotModel& model, const Pose& base, int limb,
                             const Eigen::Ref<const VecX>& q_limb);

/// Product of the leading min(3, k) singular values of the translational
/// Jacobian, i.e. sqrt(det(J J^T)) for k >= 3 and sqrt(det(J^T J)) otherwise.
double manipulability(const RobotModel& model, const Pose& base, int limb,
                      const Eigen::Ref<const VecX>& q_limb);
double manipulability(const RobotModel& model, const RobotState& state, int limb);

/// Moore-Penrose inverse with singular values below `threshold` dropped.
MatX pseudo_inverse(const Eigen::Ref<const MatX>& m, double threshold = 1e-8);

enum class IkStatus { ok, unreachable, limit_violation };

struct IkResult {
  VecX q;
  IkStatus status = IkStatus::ok;
  double residual = 0.0;
  int iterations = 0;
};

struct IkOptions {
  double damping = 1e-3;
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// Damped least-squares position IK, clamped to joint limits, warm-started
/// from `seed`. Never throws.
IkResult solve_ik(const RobotModel& model, const Pose& base, int limb, const Vec3& target,
                  const Eigen::Ref<const VecX>& seed, const IkOptions& options = {});

/// Throwing variant: Errc::unreachable or Errc::limit_violation. Seeds from
/// the limb's home configuration.
VecX inverse_kinematics(const RobotModel& model, const Pose& base, int limb, const Vec3& target);

}  // namespace climb
