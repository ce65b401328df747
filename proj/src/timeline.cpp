#include <cmath>
#include <ostream>
#include <string>

#include "climb/csv.hpp"
#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/motion.hpp"

namespace climb {

namespace {

Error with_phase(const Error& e, std::size_t phase) {
  return Error(e.code(), "phase " + std::to_string(phase) + ": " + e.what());
}

Pose integrate(const Pose& base, const Vec6& twist, double dt) {
  Pose next;
  next.position = base.position + dt * twist.head<3>();
  next.orientation = (exp_quat(Vec3(dt * twist.tail<3>())) * base.orientation).normalized();
  return next;
}

Mat3X stack(const std::vector<Vec3>& pts) {
  Mat3X m(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

// Places limb `limb` of `state` so its gripper sits at `target`, warm-started
// from the current angles.
void place_limb(const RobotModel& model, RobotState& state, int limb, const Vec3& target) {
  auto q = state.q.segment(model.offset(limb), model.limb_dof(limb));
  const IkResult r = solve_ik(model, state.base, limb, target, q);
  if (r.status != IkStatus::ok)
    throw Error(r.status == IkStatus::unreachable ? Errc::unreachable : Errc::limit_violation,
                "limb " + std::to_string(limb) + " cannot follow its reference");
  q = r.q;
}

class Builder {
 public:
  Builder(const RobotModel& model, const GaitConfig& gait, const MotionConfig& config, const RobotState& initial,
          const std::vector<Vec3>& feet, const TerrainMap* terrain)
      : model_(model),
        gait_(gait),
        config_(config),
        terrain_(terrain),
        footprint_(Footprint::of(model)),
        state_(initial),
        feet_(feet) {
    state_.qd.setZero(model.dof());
    tl_.dt = config.dt;
  }

  void swing(const Phase& phase, std::size_t index) {
    const int limb = phase.limb;
    tl_.commands.push_back({phase.t_start, limb, false, Vec3::Zero()});
    std::vector<int> support;
    for (int i = 0; i < model_.n_limbs(); ++i)
      if (i != limb) support.push_back(i);

    const Mat3X contacts = stack(feet_);
    const Vec3 up = (gait_.planar ? support_line(contacts) : regression_plane(contacts)).normal;
    const double t_move = phase.t_start + gait_.dwell;
    const SwingProblem problem =
        SwingProblem::from_state(model_, state_, limb, feet_[limb], phase.target, up, t_move, phase.t_end);

    SwingRecord rec;
    rec.phase = index;
    rec.limb = limb;
    rec.up = up;
    if (config_.strategy == Strategy::proposed) {
      SwingSolution sol = optimize_swing(problem, config_.lrst);
      rec.path = sol.trajectory;
      rec.terms = sol.terms;
      rec.baseline = sol.baseline;
      rec.solution = std::move(sol);
    } else {
      rec.path = baseline_swing(problem, config_.lrst.step_height);
      rec.terms = rec.baseline = lrst_terms(problem, rec.path, config_.lrst);
    }

    // The distributed base motion is scaled back (halving, then dropped) when
    // it would drive the base into the terrain.
    const std::size_t mark = q_.size();
    const RobotState saved = state_;
    for (double scale = 1.0;; scale = scale > 1.0 / 64.0 ? 0.5 * scale : 0.0) {
      swing_samples(phase, index, rec.path, limb, support, scale);
      if (scale == 0.0 || !penetrates(mark)) break;
      truncate(mark);
      state_ = saved;
      ++tl_.alpha_reductions;
    }
    feet_[limb] = phase.target;
    last_swing_ = limb;
    tl_.swings.push_back(std::move(rec));
  }

  void base_adjust(const Phase& phase, std::size_t index) {
    if (last_swing_ >= 0) tl_.commands.push_back({phase.t_start, last_swing_, true, feet_[last_swing_]});
    const double t_move = phase.t_start + gait_.dwell;
    const PoseTrajectory traj =
        support_phase_base_trajectory(state_.base, phase.base_target, t_move, phase.t_end - t_move);
    const long n = steps(phase.duration());
    for (long s = 0; s < n; ++s) {
      const double t = phase.t_start + static_cast<double>(s) * tl_.dt;
      record(t, index, 0.0);
      state_.base = traj.pose(t + tl_.dt);
      for (int i = 0; i < model_.n_limbs(); ++i) place_limb(model_, state_, i, feet_[i]);
    }
  }

  MotionTimeline finish(double t_end, std::size_t last_phase) {
    record(t_end, last_phase, 0.0);
    tl_.q.resize(model_.dof(), static_cast<Eigen::Index>(q_.size()));
    for (std::size_t i = 0; i < q_.size(); ++i) tl_.q.col(static_cast<Eigen::Index>(i)) = q_[i];
    return std::move(tl_);
  }

 private:
  long steps(double duration) const { return std::lround(duration / tl_.dt); }

  void swing_samples(const Phase& phase, std::size_t index, const SwingPath& path, int limb,
                     const std::vector<int>& support, double scale) {
    const long n = steps(phase.duration());
    const long n_dwell = steps(gait_.dwell);
    const bool distribute = config_.strategy == Strategy::proposed && scale > 0.0;
    for (long s = 0; s < n; ++s) {
      const double t = phase.t_start + static_cast<double>(s) * tl_.dt;
      double alpha = 0.0;
      if (s >= n_dwell) {
        if (distribute) {
          // Heun step of the base under momentum distribution.
          RobotState probe = state_;
          const Vec6 v1 = md_twist(probe, path, limb, support, t, scale, alpha);
          probe.base = integrate(state_.base, v1, tl_.dt);
          double alpha2 = 0.0;
          const Vec6 v2 = md_twist(probe, path, limb, support, t + tl_.dt, scale, alpha2);
          record(t, index, alpha);
          state_.q = probe.q;
          state_.base = integrate(state_.base, 0.5 * (v1 + v2), tl_.dt);
        } else {
          record(t, index, alpha);
        }
        place_limb(model_, state_, limb, path_position(path, t + tl_.dt));
        for (int i : support) place_limb(model_, state_, i, feet_[i]);
      } else {
        record(t, index, alpha);
      }
    }
  }

  bool penetrates(std::size_t from) const {
    if (!terrain_) return false;
    for (std::size_t k = from; k < tl_.base.size(); ++k)
      if (base_collision_depth(*terrain_, tl_.base[k], footprint_).max_penetration > 0.0) return true;
    return base_collision_depth(*terrain_, state_.base, footprint_).max_penetration > 0.0;
  }

  void truncate(std::size_t size) {
    tl_.t.resize(size);
    tl_.base.resize(size);
    tl_.phase.resize(size);
    tl_.alpha.resize(size);
    q_.resize(size);
  }

  void record(double t, std::size_t phase, double alpha) {
    tl_.t.push_back(t);
    tl_.base.push_back(state_.base);
    q_.push_back(state_.q);
    tl_.phase.push_back(static_cast<int>(phase));
    tl_.alpha.push_back(alpha);
  }

  // Base twist at time t for the base pose held in `probe`; also places the
  // limbs of `probe` and reports the distribution factor used.
  Vec6 md_twist(RobotState& probe, const SwingPath& path, int limb, const std::vector<int>& support, double t,
                double scale, double& alpha) {
    place_limb(model_, probe, limb, path_position(path, t));
    for (int i : support) place_limb(model_, probe, i, feet_[i]);
    probe.qd.setZero();
    const Mat3X jv = translational_jacobian(model_, probe.base, limb, probe.limb_q(model_, limb));
    probe.qd.segment(model_.offset(limb), model_.limb_dof(limb)) = pseudo_inverse(jv) * path_velocity(path, t);

    alpha = scale * distribution_factor(model_, probe, support, config_.md);
    for (;;) {
      try {
        return md_base_velocity(model_, probe, {limb}, support, alpha);
      } catch (const Error& e) {
        if (e.code() != Errc::near_singular || alpha < 1e-6) throw;
        alpha *= 0.5;
        ++tl_.alpha_reductions;
      }
    }
  }

  const RobotModel& model_;
  const GaitConfig& gait_;
  const MotionConfig& config_;
  const TerrainMap* terrain_;
  Footprint footprint_;
  RobotState state_;
  std::vector<Vec3> feet_;
  MotionTimeline tl_;
  std::vector<VecX> q_;
  int last_swing_ = -1;
};

}  // namespace

MotionTimeline assemble_motion(const GaitPlan& plan, const RobotModel& model, const GaitConfig& gait,
                               const MotionConfig& config, const RobotState& initial, const TerrainMap* terrain) {
  gait.validate();
  config.lrst.validate();
  config.md.validate();
  if (!(config.dt > 0.0)) throw Error(Errc::validation_error, "dt: must be positive");

  Builder builder(model, gait, config, initial, plan.initial_footholds, terrain);
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    const Phase& phase = plan.phases[i];
    try {
      if (phase.type == PhaseType::swing)
        builder.swing(phase, i);
      else
        builder.base_adjust(phase, i);
    } catch (const Error& e) {
      throw with_phase(e, i);
    }
  }
  return builder.finish(plan.duration(), plan.phases.empty() ? 0 : plan.phases.size() - 1);
}

void write_timeline_csv(std::ostream& out, const MotionTimeline& timeline, const RobotModel& model, int stride) {
  if (stride < 1) throw Error(Errc::validation_error, "stride: must be at least 1");
  out << "t,base_x,base_y,base_z,base_qw,base_qx,base_qy,base_qz";
  for (int i = 0; i < model.n_limbs(); ++i)
    for (int j = 0; j < model.limb_dof(i); ++j) out << ",q" << i << '_' << j;
  out << ",phase,alpha\n";
  for (std::size_t k = 0; k < timeline.size(); k += static_cast<std::size_t>(stride)) {
    const Pose& b = timeline.base[k];
    put_number(out, timeline.t[k]);
    for (double v : {b.position.x(), b.position.y(), b.position.z(), b.orientation.w(), b.orientation.x(),
                     b.orientation.y(), b.orientation.z()}) {
      out << ',';
      put_number(out, v);
    }
    for (Eigen::Index j = 0; j < timeline.q.rows(); ++j) {
      out << ',';
      put_number(out, timeline.q(j, static_cast<Eigen::Index>(k)));
    }
    out << ',' << timeline.phase[k] << ',';
    put_number(out, timeline.alpha[k]);
    out << '\n';
  }
}

}  // namespace climb
