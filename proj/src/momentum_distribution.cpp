#include <algorithm>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/momentum.hpp"
#include "climb/motion.hpp"

namespace climb {

void MdConfig::validate() const {
  if (!(w_min < w_max)) throw Error(Errc::validation_error, "w_min: must be below w_max");
  if (fixed_alpha && !(*fixed_alpha >= 0.0 && *fixed_alpha <= 1.0))
    throw Error(Errc::validation_error, "alpha: must be in [0, 1]");
}

double distribution_factor(double min_manipulability, const MdConfig& config) {
  if (config.fixed_alpha) return *config.fixed_alpha;
  return std::clamp((min_manipulability - config.w_min) / (config.w_max - config.w_min), 0.0, 1.0);
}

double distribution_factor(const RobotModel& model, const RobotState& state, const std::vector<int>& support,
                           const MdConfig& config) {
  if (config.fixed_alpha) return *config.fixed_alpha;
  double w = std::numeric_limits<double>::infinity();
  for (int i : support) w = std::min(w, manipulability(model, state, i));
  return distribution_factor(w, config);
}

Vec6 md_base_velocity(const RobotModel& model, const RobotState& state, const std::vector<int>& swing,
                      const std::vector<int>& support, double alpha) {
  if (support.empty()) throw Error(Errc::validation_error, "momentum distribution needs a supporting limb");
  if (alpha == 0.0) return Vec6::Zero();

  const Vec3 com = center_of_mass(model, state);
  const Mat6X a = momentum_matrix(model, state.base, state.q, com);
  Mat6 m = a.leftCols<6>();
  for (int i : support) {
    const LimbJacobians jac = limb_jacobians(model, state, i);
    const Mat6X h = a.middleCols(6 + model.offset(i), model.limb_dof(i));
    m -= h * pseudo_inverse(jac.joint.topRows<3>()) * jac.base.topRows<3>();
  }
  Vec6 source = Vec6::Zero();
  for (int i : swing) source += a.middleCols(6 + model.offset(i), model.limb_dof(i)) * state.limb_qd(model, i);

  const Eigen::JacobiSVD<Mat6> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv[5] > 0.0) || sv[0] / sv[5] >= 1e8)
    throw Error(Errc::near_singular, "momentum distribution matrix is near singular");
  return -alpha * m.partialPivLu().solve(source);
}

VecX support_joint_rates(const RobotModel& model, const RobotState& state, int limb, const Vec6& base_twist) {
  const LimbJacobians jac = limb_jacobians(model, state, limb);
  return -pseudo_inverse(jac.joint.topRows<3>()) * (jac.base.topRows<3>() * base_twist);
}

PoseTrajectory support_phase_base_trajectory(const Pose& current, const Pose& desired, double t0, double duration) {
  if (!(duration > 0.0)) throw Error(Errc::validation_error, "base trajectory duration must be positive");
  return PoseTrajectory(current, desired, t0, t0 + duration);
}

}  // namespace climb
