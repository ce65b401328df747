#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/momentum.hpp"
#include "climb/sim.hpp"

namespace climb {

void SimConfig::validate() const {
  if (!(step > 0.0)) throw Error(Errc::validation_error, "step: must be positive");
  if (!(gravity_g >= 0.0)) throw Error(Errc::validation_error, "gravity: must be non-negative");
  if (!(duration >= 0.0)) throw Error(Errc::validation_error, "duration: must be non-negative");
  if (!(servo_frequency > 0.0)) throw Error(Errc::validation_error, "servo_frequency: must be positive");
  if (!(servo_damping >= 0.0)) throw Error(Errc::validation_error, "servo_damping: must be non-negative");
  if (!(accel_bound > 0.0)) throw Error(Errc::validation_error, "accel_bound: must be positive");
  if (!(grasp_tolerance > 0.0)) throw Error(Errc::validation_error, "grasp_tolerance: must be positive");
  if (gravity_direction.norm() < 1e-12) throw Error(Errc::validation_error, "gravity_direction: must be non-zero");
}

DynamicsState DynamicsState::from_robot(const RobotModel& model, const RobotState& robot) {
  DynamicsState s;
  s.robot = robot;
  VecX v(6 + model.dof());
  v << robot.base_twist, robot.qd;
  s.momentum = momentum_matrix(model, robot.base, robot.q, Vec3::Zero()) * v;
  return s;
}

StepRecord step_dynamics(const RobotModel& model, DynamicsState& state, const JointReference& reference,
                         ContactModel& contact, const SimConfig& config, const TerrainMap* terrain,
                         const Footprint* footprint) {
  const double dt = config.step;
  RobotState& r = state.robot;
  const int n = model.n_limbs();
  StepRecord rec;
  rec.gripper_force.assign(n, Vec3::Zero());
  rec.pull.assign(n, 0.0);

  Vec6 wrench = Vec6::Zero();
  auto apply = [&](const Vec3& point, const Vec3& force) {
    wrench.head<3>() += force;
    wrench.tail<3>() += point.cross(force);
  };

  for (int i = 0; i < n; ++i) {
    if (i >= static_cast<int>(contact.attached.size()) || !contact.attached[i]) continue;
    const LimbJacobians jac = limb_jacobians(model, r, i);
    const Vec3 tip = foot_position(model, r.base, i, r.limb_q(model, i));
    const Vec3 v = jac.base.topRows<3>() * r.base_twist + jac.joint.topRows<3>() * r.limb_qd(model, i);
    const ContactForce cf = contact_force(contact, i, tip, v);
    rec.pull[i] = cf.pull;
    if (cf.detach) {
      contact.release(i);
      rec.detached.push_back(i);
      continue;
    }
    rec.gripper_force[i] = cf.force;
    apply(tip, cf.force);
  }

  if (terrain && footprint) {
    const Vec3 vb = r.base_twist.head<3>();
    const Vec3 wb = r.base_twist.tail<3>();
    for (const Vec3& local : footprint->points()) {
      const Vec3 p = r.base.transform(local);
      if (!terrain->contains(p.x(), p.y())) continue;
      const double depth = terrain->elevation(p.x(), p.y()) - p.z();
      if (depth <= 0.0) continue;
      const Vec3 normal = terrain->surface_normal(p.x(), p.y());
      const Vec3 v = vb + wb.cross(p - r.base.position);
      const double push = contact.stiffness * depth - contact.damping * v.dot(normal);
      if (push <= 0.0) continue;
      rec.base_contact_force += push;
      apply(p, push * normal);
    }
  }

  const double mass = model.total_mass();
  const Vec3 com = center_of_mass(model, r);
  apply(com, mass * config.gravity() + config.external_force);
  rec.external = wrench;
  rec.com_accel = wrench.head<3>() / mass;

  state.momentum += dt * wrench;

  const double w = 2.0 * M_PI * config.servo_frequency;
  VecX qdd = reference.qdd + 2.0 * config.servo_damping * w * (reference.qd - r.qd) + w * w * (reference.q - r.q);
  qdd = qdd.cwiseMax(-config.accel_bound).cwiseMin(config.accel_bound);
  r.qd += dt * qdd;

  auto solve_twist = [&] {
    const Mat6X a = momentum_matrix(model, r.base, r.q, Vec3::Zero());
    return Vec6(a.leftCols<6>().partialPivLu().solve(state.momentum - a.rightCols(model.dof()) * r.qd));
  };
  const Vec6 twist = solve_twist();
  r.base.position += dt * twist.head<3>();
  r.base.orientation = (exp_quat(Vec3(dt * twist.tail<3>())) * r.base.orientation).normalized();
  r.q += dt * r.qd;
  // keep the stored velocities consistent with the momentum at the new configuration
  const Vec6 next = solve_twist();
  rec.base_accel = (next - r.base_twist) / dt;
  r.base_twist = next;
  state.t += dt;

  if (!next.allFinite() || !r.qd.allFinite() || next.norm() > config.divergence_bound ||
      r.qd.cwiseAbs().maxCoeff() > config.divergence_bound)
    throw Error(Errc::numerical_divergence, "state exceeded bound at t = " + std::to_string(state.t) + " s");
  return rec;
}

}  // namespace climb
