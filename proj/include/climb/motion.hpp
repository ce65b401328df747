#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "climb/bezier.hpp"
#include "climb/gait.hpp"
#include "climb/robot_model.hpp"
#include "climb/types.hpp"

namespace climb {

// ---------------------------------------------------------------------------
// Low-reaction swing trajectory

struct LrstConfig {
  double c_lin = 7.0;          // weight on peak linear momentum rate
  double c_ang = 1.75;         // weight on peak angular momentum rate
  double c_height = 30.0;      // weight on step-height error
  double step_height = 0.04;   // h_sw (m)
  int samples = 64;            // N, trajectory samples per evaluation
  int restarts = 8;
  int max_iterations = 2000;
  double tolerance = 1e-8;
  double initial_step = 0.01;  // initial simplex edge (m)
  std::uint64_t seed = 7;

  void validate() const;
};

/// Everything the objective needs about one swing. The base stays frozen at
/// `base`; momenta are taken about the fixed point `reference`.
struct SwingProblem {
  const RobotModel* model = nullptr;
  Pose base;
  int limb = 0;
  VecX seed;                   // limb joint angles at the start of the swing
  Vec3 reference = Vec3::Zero();
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  Vec3 up = Vec3::UnitZ();     // support-plane normal; heights are measured along it
  double t0 = 0.0;
  double tf = 1.0;

  static SwingProblem from_state(const RobotModel& model, const RobotState& state, int limb,
                                 const Vec3& start, const Vec3& goal, const Vec3& up, double t0, double tf);
};

/// Regular swing: quintic from start to goal plus a rise-and-fall of two
/// quintics along `up` that peaks at the step height halfway through.
class BaselineSwing {
 public:
  BaselineSwing() = default;
  BaselineSwing(const Vec3& start, const Vec3& goal, const Vec3& up, double height, double t0, double tf)
      : start_(start), goal_(goal), up_(up.normalized()), height_(height), t0_(t0), tf_(tf) {}

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  double t0() const { return t0_; }
  double tf() const { return tf_; }

 private:
  Vec3 start_ = Vec3::Zero(), goal_ = Vec3::Zero(), up_ = Vec3::UnitZ();
  double height_ = 0.0, t0_ = 0.0, tf_ = 1.0;
};

using SwingPath = std::variant<SwingTrajectory, BaselineSwing>;

Vec3 path_position(const SwingPath& path, double t);
Vec3 path_velocity(const SwingPath& path, double t);

/// Height of `p` above the chord from `start` to `goal`, measured along `up`.
double swing_height(const Vec3& p, const Vec3& start, const Vec3& goal, const Vec3& up);

struct LrstTerms {
  bool feasible = false;
  double max_lin_rate = 0.0;   // max_t |dL_lin/dt|_inf
  double max_ang_rate = 0.0;   // max_t |dL_ang/dt|_inf
  double peak_rate = 0.0;      // max_t |dL/dt|_2 over the stacked 6-vector
  double apex = 0.0;           // max_t swing height
  double cost = 0.0;           // +inf when infeasible
};

/// Samples the path, solves IK at every sample (joint limits enforced there)
/// and scores the swing. Never throws; infeasible paths get an infinite cost.
LrstTerms lrst_terms(const SwingProblem& problem, const SwingPath& path, const LrstConfig& config);

/// Cost of the Bezier candidate defined by A_B3, A_B4. Throws Errc::infeasible.
double lrst_objective(const SwingProblem& problem, const Vec3& a3, const Vec3& a4, const LrstConfig& config);

/// Interior control points of the straight-line seed, lifted so the apex sits
/// at the step height.
std::pair<Vec3, Vec3> seed_control_points(const SwingProblem& problem, double step_height);

BaselineSwing baseline_swing(const SwingProblem& problem, double step_height);

struct SwingSolution {
  SwingTrajectory trajectory;
  LrstTerms terms;
  LrstTerms baseline;
  std::vector<double> history;   // best cost per iteration of the winning restart
  int feasible_restarts = 0;
};

/// Multi-start simplex search over A_B3, A_B4. Restarts run concurrently and
/// merge by lowest cost, ties to the lower restart index.
/// Throws Errc::no_feasible_trajectory when no restart finds a feasible path.
SwingSolution optimize_swing(const SwingProblem& problem, const LrstConfig& config);

// ---------------------------------------------------------------------------
// Momentum distribution

struct MdConfig {
  double w_min = 1.2e-3;
  double w_max = 2.5e-3;
  std::optional<double> fixed_alpha;

  void validate() const;
};

/// alpha = clamp((min_i w_i - w_min) / (w_max - w_min), 0, 1) over supporting
/// limbs, or the fixed override.
double distribution_factor(const RobotModel& model, const RobotState& state,
                           const std::vector<int>& support, const MdConfig& config);
double distribution_factor(double min_manipulability, const MdConfig& config);

/// Base twist that hands the fraction alpha of the swing momentum to the base
/// and supporting limbs:
///   xb_dot = -alpha (H_b - sum_sup H_bm,i J_m,i^+ J_b,i)^-1 sum_sw H_bm,i qd_i
/// using the translational contact Jacobians. Swing rates come from state.qd.
/// Throws Errc::near_singular when the 6x6 matrix has condition >= 1e8.
Vec6 md_base_velocity(const RobotModel& model, const RobotState& state, const std::vector<int>& swing,
                      const std::vector<int>& support, double alpha);

/// Joint rates that keep a supporting gripper fixed while the base moves.
VecX support_joint_rates(const RobotModel& model, const RobotState& state, int limb, const Vec6& base_twist);

/// Quintic base trajectory for a support phase.
PoseTrajectory support_phase_base_trajectory(const Pose& current, const Pose& desired, double t0, double duration);

// ---------------------------------------------------------------------------
// Full reference timeline

struct MotionConfig {
  Strategy strategy = Strategy::proposed;
  LrstConfig lrst;
  MdConfig md;
  double dt = 1e-3;
};

struct ContactCommand {
  double t = 0.0;
  int limb = 0;
  bool grasp = false;           // false: release
  Vec3 target = Vec3::Zero();   // grasp point
};

struct SwingRecord {
  std::size_t phase = 0;
  int limb = 0;
  SwingPath path;
  LrstTerms terms;
  LrstTerms baseline;
  std::optional<SwingSolution> solution;   // set for optimized swings
  Vec3 up = Vec3::UnitZ();
};

/// Sampled references at a fixed step: base pose, joint angles, phase id and
/// distribution factor, plus the grasp/release schedule.
struct MotionTimeline {
  double dt = 1e-3;
  std::vector<double> t;
  std::vector<Pose> base;
  MatX q;                        // dof x samples
  std::vector<int> phase;
  std::vector<double> alpha;
  std::vector<ContactCommand> commands;
  std::vector<SwingRecord> swings;
  int alpha_reductions = 0;      // α halvings (near-singular support or base-ground contact)

  std::size_t size() const { return t.size(); }
  double duration() const { return t.empty() ? 0.0 : t.back(); }
};

/// Turns a gait plan into per-step references. Throws with the phase index
/// when a planner stage fails. With a terrain, a swing whose distributed base
/// motion would reach the ground is replanned with α halved (down to zero);
/// each retry counts as an alpha reduction.
MotionTimeline assemble_motion(const GaitPlan& plan, const RobotModel& model, const GaitConfig& gait,
                               const MotionConfig& config, const RobotState& initial,
                               const TerrainMap* terrain = nullptr);

/// CSV: t, base pose, joint angles per limb, phase, alpha. Every `stride`-th sample.
void write_timeline_csv(std::ostream& out, const MotionTimeline& timeline, const RobotModel& model,
                        int stride = 1);

}  // namespace climb
