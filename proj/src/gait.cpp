#include "climb/gait.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "climb/error.hpp"
#include "climb/kinematics.hpp"

namespace climb {

std::string_view to_string(Strategy s) noexcept {
  return s == Strategy::baseline ? "baseline" : "proposed";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "baseline") return Strategy::baseline;
  if (text == "proposed") return Strategy::proposed;
  throw Error(Errc::validation_error, "strategy: expected baseline or proposed, got '" + std::string(text) + "'");
}

namespace {

Quat frame_from_normal(const Vec3& normal) {
  const Vec3 z = normal.normalized();
  Vec3 x = Vec3::UnitX() - Vec3::UnitX().dot(z) * z;
  if (x.norm() < 1e-9) x = Vec3::UnitY() - Vec3::UnitY().dot(z) * z;
  x.normalize();
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return Quat(r).normalized();
}

}  // namespace

SupportPlane regression_plane(const Eigen::Ref<const Mat3X>& points) {
  const Eigen::Index n = points.cols();
  if (n < 3) throw Error(Errc::degenerate, "regression plane needs at least 3 contact points");
  SupportPlane plane;
  plane.centroid = points.rowwise().mean();

  // Centered design matrix [dx dy]; the intercept passes through the centroid.
  Eigen::Matrix<double, Eigen::Dynamic, 2> design(n, 2);
  VecX rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = points(0, i) - plane.centroid.x();
    design(i, 1) = points(1, i) - plane.centroid.y();
    rhs[i] = points(2, i) - plane.centroid.z();
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, Eigen::Dynamic, 2>> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 2) throw Error(Errc::degenerate, "contact points are collinear in the horizontal plane");
  const Eigen::Vector2d slope = qr.solve(rhs);

  plane.normal = Vec3(-slope.x(), -slope.y(), 1.0).normalized();
  plane.frame = frame_from_normal(plane.normal);
  plane.residual = std::sqrt((design * slope - rhs).squaredNorm() / static_cast<double>(n));
  return plane;
}

SupportPlane support_line(const Eigen::Ref<const Mat3X>& points) {
  if (points.cols() < 1) throw Error(Errc::degenerate, "support line needs a contact point");
  SupportPlane plane;
  plane.centroid = points.rowwise().mean();
  Vec3 dir = Vec3::UnitX();
  if (points.cols() >= 2) {
    dir = points.col(points.cols() - 1) - points.col(0);
    dir.y() = 0.0;
    if (dir.norm() < 1e-12) dir = Vec3::UnitX();
    if (dir.x() < 0.0) dir = -dir;
    dir.normalize();
  }
  plane.normal = Vec3(-dir.z(), 0.0, dir.x());
  plane.frame = frame_from_normal(plane.normal);
  return plane;
}

void GaitConfig::validate() const {
  if (!(swing_period > 0.0)) throw Error(Errc::validation_error, "swing_period: must be positive");
  if (!(stride > 0.0)) throw Error(Errc::validation_error, "stride: must be positive");
  if (!(step_height > 0.0)) throw Error(Errc::validation_error, "step_height: must be positive");
  if (order.empty()) throw Error(Errc::validation_error, "order: needs at least one limb");
  if (!(dwell >= 0.0 && dwell < swing_period))
    throw Error(Errc::validation_error, "dwell: must be in [0, swing_period)");
  if (heading.norm() < 1e-12) throw Error(Errc::validation_error, "heading: must be non-zero");
}

Pose desired_base_pose(const SupportPlane& plane, const GaitConfig& config, const TerrainMap& map,
                       const Footprint& footprint, const std::optional<Pose>& from) {
  Pose target;
  target.position = Vec3(plane.centroid.x(), plane.centroid.y(), plane.centroid.z() + config.nominal_height);
  target.orientation = plane.frame;

  // Deepest penetration at the target and along the straight path to it.
  auto max_depth = [&](const Pose& goal) {
    double depth = base_collision_depth(map, goal, footprint).max_penetration;
    if (from) {
      for (int k = 1; k < config.path_samples + 1; ++k) {
        const double s = static_cast<double>(k) / (config.path_samples + 1);
        Pose mid;
        mid.position = (1.0 - s) * from->position + s * goal.position;
        mid.orientation = from->orientation.slerp(s, goal.orientation);
        depth = std::max(depth, base_collision_depth(map, mid, footprint).max_penetration);
      }
    }
    return depth;
  };

  double depth = max_depth(target);
  if (depth == 0.0) return target;
  target.position.z() += depth + config.clearance - footprint.b_low;

  // Path samples only rise with a fraction of the target's lift, and a
  // clearance below b_low leaves residual penetration: keep lifting until clear.
  for (int iter = 0; iter < 64; ++iter) {
    depth = max_depth(target);
    if (depth == 0.0) return target;
    target.position.z() += depth + std::max(config.clearance, 1e-4);
  }
  throw Error(Errc::infeasible, "could not clear base collision");
}

Pose nominal_base_pose(const Eigen::Ref<const Mat3X>& contacts, const GaitConfig& config) {
  Pose pose;
  const Vec3 c = contacts.rowwise().mean();
  pose.position = Vec3(c.x(), c.y(), c.z() + config.nominal_height);
  return pose;
}

Vec3 next_foothold(const Vec3& current, const Vec2& heading, double stride, const TerrainMap& map) {
  const Vec2 dir = heading.normalized();
  const double x = current.x() + stride * dir.x();
  const double y = current.y() + stride * dir.y();
  if (stride == 0.0) return current;
  return Vec3(x, y, map.elevation(x, y));
}

namespace {

Mat3X stack(const std::vector<Vec3>& pts) {
  Mat3X m(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

void require_reachable(const RobotModel& model, const Pose& base, int limb, const Vec3& target,
                       std::size_t phase) {
  const IkResult r = solve_ik(model, base, limb, target, model.limbs[limb].home);
  if (r.status != IkStatus::ok)
    throw Error(Errc::infeasible, "phase " + std::to_string(phase) + ": limb " + std::to_string(limb) +
                                      (r.status == IkStatus::unreachable ? " cannot reach" : " exceeds joint limits at") +
                                      " its foothold");
}

}  // namespace

GaitPlan build_gait_plan(const RobotModel& model, const GaitConfig& config, const RobotState& initial,
                         int n_cycles, const TerrainMap& map, Strategy strategy) {
  config.validate();
  for (int limb : config.order)
    if (limb < 0 || limb >= model.n_limbs())
      throw Error(Errc::validation_error, "order: limb index " + std::to_string(limb) + " out of range");

  GaitPlan plan;
  plan.initial_base = initial.base;
  plan.initial_footholds = initial.anchors;
  if (n_cycles <= 0) return plan;

  const Footprint footprint = Footprint::of(model);
  std::vector<Vec3> feet = initial.anchors;
  Pose base = initial.base;
  std::size_t k = 0;
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    for (int limb : config.order) {
      Phase swing;
      swing.type = PhaseType::swing;
      swing.limb = limb;
      swing.start = feet[limb];
      swing.target = next_foothold(feet[limb], config.heading, config.stride, map);
      swing.base_target = base;
      swing.t_start = static_cast<double>(k) * config.swing_period;
      swing.t_end = static_cast<double>(k + 1) * config.swing_period;
      require_reachable(model, base, limb, swing.target, k);
      feet[limb] = swing.target;
      plan.phases.push_back(swing);
      ++k;

      Phase adjust;
      adjust.type = PhaseType::base_adjust;
      adjust.t_start = static_cast<double>(k) * config.swing_period;
      adjust.t_end = static_cast<double>(k + 1) * config.swing_period;
      const Mat3X contacts = stack(feet);
      if (strategy == Strategy::proposed) {
        const SupportPlane plane = config.planar ? support_line(contacts) : regression_plane(contacts);
        adjust.base_target = config.planar ? nominal_base_pose(contacts, config)
                                           : desired_base_pose(plane, config, map, footprint, base);
      } else {
        adjust.base_target = nominal_base_pose(contacts, config);
      }
      // keep the initial heading of the body for the level baseline pose
      if (strategy == Strategy::baseline || config.planar) adjust.base_target.orientation = initial.base.orientation;
      for (int i = 0; i < model.n_limbs(); ++i) require_reachable(model, adjust.base_target, i, feet[i], k);
      base = adjust.base_target;
      plan.phases.push_back(adjust);
      ++k;
    }
  }
  return plan;
}

void write_phase_table(std::ostream& out, const GaitPlan& plan) {
  out << "phase,type,limb,t_start,t_end,start_x,start_y,start_z,target_x,target_y,target_z,"
         "base_x,base_y,base_z,base_qw,base_qx,base_qy,base_qz\n";
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    const Phase& p = plan.phases[i];
    const Quat& q = p.base_target.orientation;
    out << i << ',' << (p.type == PhaseType::swing ? "swing" : "base_adjust") << ',' << p.limb << ','
        << p.t_start << ',' << p.t_end << ',' << p.start.x() << ',' << p.start.y() << ',' << p.start.z() << ','
        << p.target.x() << ',' << p.target.y() << ',' << p.target.z() << ',' << p.base_target.position.x()
        << ',' << p.base_target.position.y() << ',' << p.base_target.position.z() << ',' << q.w() << ','
        << q.x() << ',' << q.y() << ',' << q.z() << '\n';
  }
}

}  // namespace climb
