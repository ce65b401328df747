#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "climb/gait.hpp"
#include "climb/motion.hpp"
#include "climb/robot_model.hpp"
#include "climb/terrain.hpp"
#include "climb/types.hpp"

namespace climb {

inline constexpr double standard_gravity = 9.80665;

// ---------------------------------------------------------------------------
// Gripper contact

/// Spring-damper grippers. A gripper pulls its anchor with
/// F = -k (p - anchor) - c v and lets go when the pull along the outward
/// surface normal exceeds `hold_force`.
struct ContactModel {
  double stiffness = 4000.0;   // k (N/m)
  double damping = 1.0;        // c (N s/m)
  double hold_force = 0.9;     // F_hold (N)
  std::vector<Vec3> anchors;
  std::vector<Vec3> normals;   // outward surface normal at each anchor
  std::vector<bool> attached;

  void validate() const;
  /// Grasps at `anchor` with outward normal `normal`.
  void attach(int gripper, const Vec3& anchor, const Vec3& normal);
  void release(int gripper) { attached.at(gripper) = false; }
};

struct ContactForce {
  Vec3 force = Vec3::Zero();   // acting on the gripper
  double pull = 0.0;           // component extracting the gripper, -F . n
  bool detach = false;
};

/// Force on one gripper; zero when the gripper is not attached.
ContactForce contact_force(const ContactModel& contact, int gripper, const Vec3& position, const Vec3& velocity);

// ---------------------------------------------------------------------------
// Dynamics

struct SimConfig {
  double gravity_g = 1e-6;          // in units of standard gravity
  double step = 1e-3;               // (s)
  double duration = 0.0;            // 0: the full planned timeline
  double servo_frequency = 20.0;    // joint servo natural frequency (Hz)
  double servo_damping = 1.0;       // joint servo damping ratio
  double accel_bound = 100.0;       // |commanded joint acceleration| cap (rad/s^2)
  double divergence_bound = 1e3;    // |base twist| or |joint rate| limit
  double grasp_tolerance = 5e-3;    // (m)
  bool stop_on_failure = true;
  Vec3 gravity_direction = -Vec3::UnitZ();
  Vec3 external_force = Vec3::Zero();   // applied at the center of mass

  Vec3 gravity() const { return gravity_g * standard_gravity * gravity_direction.normalized(); }
  void validate() const;
};

/// Robot state plus the total momentum about the world origin, which is the
/// integrated quantity; the base twist is recovered from it each step.
struct DynamicsState {
  RobotState robot;
  Vec6 momentum = Vec6::Zero();
  double t = 0.0;

  static DynamicsState from_robot(const RobotModel& model, const RobotState& robot);
};

struct JointReference {
  VecX q, qd, qdd;
};

struct StepRecord {
  std::vector<Vec3> gripper_force;
  std::vector<double> pull;
  std::vector<int> detached;        // grippers that let go during this step
  Vec6 external = Vec6::Zero();     // net external wrench about the world origin
  Vec3 com_accel = Vec3::Zero();
  Vec6 base_accel = Vec6::Zero();
  double base_contact_force = 0.0;  // terrain push on the base footprint (N)
};

/// One semi-implicit step: momentum update from external wrenches, joint
/// servo, base twist from the momentum balance, then positions. Grippers
/// whose pull exceeds the hold force are released in `contact`.
/// `terrain` enables base-terrain penalty contact with the gripper k and c.
/// Throws Errc::numerical_divergence.
StepRecord step_dynamics(const RobotModel& model, DynamicsState& state, const JointReference& reference,
                         ContactModel& contact, const SimConfig& config, const TerrainMap* terrain = nullptr,
                         const Footprint* footprint = nullptr);

// ---------------------------------------------------------------------------
// Gravito-inertial acceleration margin

struct GiaMargin {
  double margin = 0.0;           // (m), positive when stable
  bool no_intersection = false;  // fell back to the projected-CoM rule
};

/// Tipping margin over the support polygon (segment for two contacts in
/// planar mode). Per edge e with outward direction u_e:
///   margin_e = (R_e - M (a_n d_e + h a_t,e)) / (M max(a_n, 0) + n F_hold)
/// where a_n is the gravito-inertial acceleration into the surface, a_t,e its
/// component along u_e, d_e the outward distance of the projected CoM, h the
/// CoM height and R_e the holding moment of the contacts off the edge. With
/// F_hold = 0 this is the distance from the edge to where the line through
/// the CoM along the GIA meets the support plane.
GiaMargin gia_margin(const Vec3& com, double mass, const Vec3& gia, const Eigen::Ref<const Mat3X>& contacts,
                     double hold_force, bool planar);

GiaMargin gia_margin(const RobotModel& model, const RobotState& state, const Eigen::Ref<const Mat3X>& contacts,
                     const Vec3& com_accel, const Vec3& gravity, double hold_force);

// ---------------------------------------------------------------------------
// Full runs

enum class EventType { release, grasp, missed_grasp, detachment };

struct SimEvent {
  double t = 0.0;
  EventType type = EventType::grasp;
  int limb = 0;
  double value = 0.0;   // miss distance or pull at detachment
};

std::string_view to_string(EventType type) noexcept;

struct SimTrace {
  int n_grippers = 0;
  bool stopped_early = false;      // ended at a failure event
  std::vector<double> t;
  std::vector<Pose> base;
  std::vector<Vec6> base_twist;
  std::vector<Vec6> base_accel;
  std::vector<VecX> q;
  std::vector<std::vector<Vec3>> force;
  std::vector<double> max_force;   // max |F| over grippers
  std::vector<double> max_pull;
  std::vector<double> gia;
  std::vector<bool> gia_fallback;
  std::vector<Vec6> momentum;      // about the world origin
  std::vector<SimEvent> events;

  std::size_t size() const { return t.size(); }
};

struct RunSummary {
  bool completed = false;          // ran the full requested time
  bool success = false;            // completed without detachment or missed grasp
  std::vector<SimEvent> detachments;
  std::vector<SimEvent> missed_grasps;
  double duration = 0.0;
  double max_force = 0.0;
  double max_pull = 0.0;
  double min_gia = 0.0;
  int cycles_completed = 0;
  double mean_forward_velocity = 0.0;   // (m/s) over completed cycles
  double peak_base_linear_accel = 0.0;
  double peak_base_angular_accel = 0.0;
  int alpha_reductions = 0;
  double mean_peak_rate = 0.0;          // planned swings, mean of peak |dL/dt|
  double mean_baseline_peak_rate = 0.0;
  double max_apex_error = 0.0;          // |apex - h_sw| over planned swings
};

void write_summary(std::ostream& out, const RunSummary& summary);

/// Follows a motion timeline with the dynamics model. Stops at the first
/// detachment or missed grasp when `config.stop_on_failure` is set.
SimTrace simulate(const RobotModel& model, const RobotState& initial, const MotionTimeline& timeline,
                  ContactModel contact, const SimConfig& config, const TerrainMap* terrain = nullptr);

RunSummary summarize(const SimTrace& trace, const MotionTimeline& timeline, const GaitConfig& gait,
                     const LrstConfig& lrst);

/// Sample indices kept at `stride`: every stride-th step, the last step and
/// every step that carries an event.
std::vector<std::size_t> trace_rows(const SimTrace& trace, int stride);

/// CSV with one row per kept sample (see trace_rows).
void write_trace_csv(std::ostream& out, const SimTrace& trace, int stride = 1);

}  // namespace climb
