#pragma once

#include <string>
#include <vector>

#include "climb/types.hpp"

namespace climb {

/// One revolute joint and the rigid link that follows it.
///
/// The joint rotates about `axis`, expressed in the frame of the parent link.
/// `link` runs from this joint to the next joint (or to the gripper for the
/// last joint), expressed in the frame after rotation.
struct JointModel {
  Vec3 axis = Vec3::UnitZ();
  Vec3 link = Vec3::Zero();
  double mass = 0.0;
  double com_ratio = 0.5;        // center of mass at com_ratio * link
  Mat3 inertia = Mat3::Zero();   // about the link COM, link frame
  double lower = -M_PI;
  double upper = M_PI;
};

struct LimbModel {
  std::string name;
  Vec3 mount_position = Vec3::Zero();       // base frame
  Mat3 mount_rotation = Mat3::Identity();   // base frame
  std::vector<JointModel> joints;
  VecX home;                                // nominal stance angles

  int dof() const { return static_cast<int>(joints.size()); }
  double reach() const;
};

struct BaseModel {
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity();
  double length = 0.1;   // footprint extent along base x
  double width = 0.1;    // footprint extent along base y
  double b_low = 0.0;    // distance from base origin down to the inferior plane
};

/// Floating base plus serial-chain limbs. Limb joint coordinates are stacked
/// in limb order; `offset(i)` gives the start of limb i.
struct RobotModel {
  std::string name;
  BaseModel base;
  std::vector<LimbModel> limbs;
  bool planar = false;   // all motion in the world x-z plane

  int n_limbs() const { return static_cast<int>(limbs.size()); }
  int dof() const;
  int offset(int limb) const;
  int limb_dof(int limb) const { return limbs.at(limb).dof(); }
  double total_mass() const;
  VecX home() const;

  /// Throws Errc::bad_config naming the first broken invariant.
  void validate() const;
};

/// Uniform slender rod along `link`, used for the shipped presets.
Mat3 rod_inertia(double mass, double length);

/// Yaw-pitch-pitch limb with links along local x.
LimbModel make_ypp_limb(std::string name, const Vec3& mount, double mount_yaw,
                        const Eigen::Vector3d& lengths, const Eigen::Vector3d& masses);

/// Desk-scale quadruped: ~3 kg, 3 revolute joints per limb, ~0.1 m links.
/// Limb order: front-left, front-right, rear-left, rear-right.
RobotModel make_reference_quadruped();

/// Floating platform with two planar 2-link arms moving in the x-z plane.
RobotModel make_planar_two_arm();

/// Pose, twist, joint coordinates and gripper attachment of a robot.
struct RobotState {
  Pose base;
  Vec6 base_twist = Vec6::Zero();   // world linear velocity of base origin; world angular velocity
  VecX q;
  VecX qd;
  std::vector<bool> attached;       // gripper grasping the surface
  std::vector<Vec3> anchors;        // grasp anchor per limb (valid when attached)

  static RobotState at_rest(const RobotModel& model, const Pose& base, const VecX& q);

  auto limb_q(const RobotModel& model, int limb) const {
    return q.segment(model.offset(limb), model.limb_dof(limb));
  }
  auto limb_qd(const RobotModel& model, int limb) const {
    return qd.segment(model.offset(limb), model.limb_dof(limb));
  }
};

}  // namespace climb
