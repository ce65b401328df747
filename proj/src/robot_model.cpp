#include "climb/robot_model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "climb/error.hpp"

namespace climb {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::bad_config: return "BadConfig";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::degenerate: return "Degenerate";
    case Errc::unreachable: return "Unreachable";
    case Errc::limit_violation: return "LimitViolation";
    case Errc::infeasible: return "Infeasible";
    case Errc::no_feasible_trajectory: return "NoFeasibleTrajectory";
    case Errc::near_singular: return "NearSingular";
    case Errc::numerical_divergence: return "NumericalDivergence";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::seed_mismatch: return "SeedMismatch";
    case Errc::io_error: return "IoError";
  }
  return "Error";
}

double LimbModel::reach() const {
  double r = 0.0;
  for (const auto& j : joints) r += j.link.norm();
  return r;
}

int RobotModel::dof() const {
  int n = 0;
  for (const auto& l : limbs) n += l.dof();
  return n;
}

int RobotModel::offset(int limb) const {
  int n = 0;
  for (int i = 0; i < limb; ++i) n += limbs[i].dof();
  return n;
}

double RobotModel::total_mass() const {
  double m = base.mass;
  for (const auto& l : limbs)
    for (const auto& j : l.joints) m += j.mass;
  return m;
}

VecX RobotModel::home() const {
  VecX q(dof());
  for (int i = 0; i < n_limbs(); ++i) q.segment(offset(i), limb_dof(i)) = limbs[i].home;
  return q;
}

namespace {

bool is_spd(const Mat3& m) {
  if (!m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::bad_config, what); }

}  // namespace

void RobotModel::validate() const {
  if (n_limbs() < 2) fail("robot needs at least 2 limbs");
  if (!(base.mass > 0.0)) fail("base mass must be positive");
  if (!is_spd(base.inertia)) fail("base inertia must be symmetric positive definite");
  for (int i = 0; i < n_limbs(); ++i) {
    const auto& limb = limbs[i];
    if (limb.joints.empty()) fail("limb " + std::to_string(i) + " has no joints");
    if (limb.home.size() != limb.dof()) fail("limb " + std::to_string(i) + " home size mismatch");
    for (int j = 0; j < limb.dof(); ++j) {
      const auto& jt = limb.joints[j];
      const std::string tag = "limb " + std::to_string(i) + " joint " + std::to_string(j);
      if (!(jt.mass > 0.0)) fail(tag + ": mass must be positive");
      if (!is_spd(jt.inertia)) fail(tag + ": inertia must be symmetric positive definite");
      if (!(jt.lower < jt.upper)) fail(tag + ": lower limit must be below upper limit");
      if (std::abs(jt.axis.norm() - 1.0) > 1e-9) fail(tag + ": axis must be unit length");
    }
  }
}

Mat3 rod_inertia(double mass, double length) {
  const double transverse = mass * length * length / 12.0;
  // a thin rod still needs a tiny axial inertia to stay positive definite
  const double axial = std::max(1e-3 * transverse, 1e-9);
  return Eigen::Vector3d(axial, transverse, transverse).asDiagonal();
}

LimbModel make_ypp_limb(std::string name, const Vec3& mount, double mount_yaw,
                        const Eigen::Vector3d& lengths, const Eigen::Vector3d& masses) {
  LimbModel limb;
  limb.name = std::move(name);
  limb.mount_position = mount;
  limb.mount_rotation = Eigen::AngleAxisd(mount_yaw, Vec3::UnitZ()).toRotationMatrix();

  const Vec3 axes[3] = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitY()};
  const double lower[3] = {-1.2, -1.5, 0.05};
  const double upper[3] = {1.2, 1.5, 2.8};
  for (int j = 0; j < 3; ++j) {
    JointModel jt;
    jt.axis = axes[j];
    jt.link = Vec3(lengths[j], 0.0, 0.0);
    jt.mass = masses[j];
    jt.inertia = rod_inertia(masses[j], lengths[j]);
    jt.lower = lower[j];
    jt.upper = upper[j];
    limb.joints.push_back(jt);
  }
  limb.home = Eigen::Vector3d(0.0, -0.35, 1.75);
  return limb;
}

RobotModel make_reference_quadruped() {
  RobotModel model;
  model.name = "quadruped_reference";
  model.base.mass = 1.8;
  const double lx = 0.16, ly = 0.16, lz = 0.04;
  model.base.inertia = (model.base.mass / 12.0 *
                        Eigen::Vector3d(ly * ly + lz * lz, lx * lx + lz * lz, lx * lx + ly * ly))
                           .asDiagonal();
  model.base.length = lx;
  model.base.width = ly;
  // the limbs mount 1 cm above the belly plate
  model.base.b_low = 0.01;

  const Eigen::Vector3d lengths(0.05, 0.12, 0.12);
  const Eigen::Vector3d masses(0.06, 0.12, 0.12);
  const double h = 0.08;
  model.limbs.push_back(make_ypp_limb("front_left", Vec3(h, h, 0), M_PI / 4, lengths, masses));
  model.limbs.push_back(make_ypp_limb("front_right", Vec3(h, -h, 0), -M_PI / 4, lengths, masses));
  model.limbs.push_back(make_ypp_limb("rear_left", Vec3(-h, h, 0), 3 * M_PI / 4, lengths, masses));
  model.limbs.push_back(make_ypp_limb("rear_right", Vec3(-h, -h, 0), -3 * M_PI / 4, lengths, masses));
  return model;
}

RobotModel make_planar_two_arm() {
  RobotModel model;
  model.name = "planar_two_arm";
  model.planar = true;
  model.base.mass = 4.0;
  const double lx = 0.30, ly = 0.20, lz = 0.06;
  model.base.inertia = (model.base.mass / 12.0 *
                        Eigen::Vector3d(ly * ly + lz * lz, lx * lx + lz * lz, lx * lx + ly * ly))
                           .asDiagonal();
  model.base.length = lx;
  model.base.width = ly;
  model.base.b_low = lz / 2.0;

  // Arms hang toward -z; both joints rotate about y so motion stays in x-z.
  const Mat3 down = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitY()).toRotationMatrix();
  const double lengths[2] = {0.2, 0.2};
  const double masses[2] = {0.5, 0.4};
  const char* names[2] = {"rear", "front"};
  const double mount_x[2] = {-0.1, 0.1};
  for (int a = 0; a < 2; ++a) {
    LimbModel limb;
    limb.name = names[a];
    limb.mount_position = Vec3(mount_x[a], 0.0, 0.0);
    limb.mount_rotation = down;
    for (int j = 0; j < 2; ++j) {
      JointModel jt;
      jt.axis = Vec3::UnitY();
      jt.link = Vec3(lengths[j], 0.0, 0.0);
      jt.mass = masses[j];
      jt.inertia = rod_inertia(masses[j], lengths[j]);
      jt.lower = j == 0 ? -1.6 : 0.05;
      jt.upper = j == 0 ? 1.6 : 2.8;
      limb.joints.push_back(jt);
    }
    limb.home = Eigen::Vector2d(-0.9, 1.8);
    model.limbs.push_back(limb);
  }
  return model;
}

RobotState RobotState::at_rest(const RobotModel& model, const Pose& base, const VecX& q) {
  RobotState s;
  s.base = base;
  s.q = q;
  s.qd = VecX::Zero(model.dof());
  s.attached.assign(model.n_limbs(), true);
  s.anchors.assign(model.n_limbs(), Vec3::Zero());
  return s;
}

}  // namespace climb
