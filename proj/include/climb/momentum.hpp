#pragma once

#include <vector>

#include "climb/robot_model.hpp"
#include "climb/types.hpp"

namespace climb {

/// Linear (head) and angular (tail) momentum about `reference`, split into the
/// part carried by the base twist, by supporting-limb rates and by swinging-limb
/// rates. `total` is the sum of the three parts.
struct MomentumState {
  Vec6 total = Vec6::Zero();
  Vec6 base = Vec6::Zero();
  Vec6 support = Vec6::Zero();
  Vec6 swing = Vec6::Zero();
  Vec3 reference = Vec3::Zero();

  auto linear() const { return total.head<3>(); }
  auto angular() const { return total.tail<3>(); }
};

Vec3 center_of_mass(const RobotModel& model, const Pose& base, const VecX& q);
Vec3 center_of_mass(const RobotModel& model, const RobotState& state);

/// System momentum matrix [H_b | H_bm,0 | H_bm,1 | ...] about `reference`,
/// so that momentum = A * [base_twist; qd].
Mat6X momentum_matrix(const RobotModel& model, const Pose& base, const VecX& q,
                      const Vec3& reference);

/// H_b about the center of mass.
Mat6 base_inertia(const RobotModel& model, const RobotState& state);

/// H_bm,i about the center of mass.
Mat6X coupling_inertia(const RobotModel& model, const RobotState& state, int limb);

/// H_bm,i of one limb about a given reference point; only the limb's own
/// links enter, so the rest of the configuration is not needed.
Mat6X coupling_inertia(const RobotModel& model, const Pose& base, int limb,
                       const Eigen::Ref<const VecX>& q_limb, const Vec3& reference);

/// Momentum about the center of mass, summed link by link from link velocities.
/// A limb counts as supporting when `state.attached[limb]` is set.
MomentumState momentum(const RobotModel& model, const RobotState& state);

/// Same summation, with an explicit support partition and reference point.
MomentumState momentum(const RobotModel& model, const RobotState& state,
                       const std::vector<bool>& supporting, const Vec3& reference);

}  // namespace climb
