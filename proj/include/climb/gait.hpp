#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "climb/robot_model.hpp"
#include "climb/terrain.hpp"
#include "climb/types.hpp"

namespace climb {

enum class Strategy { baseline, proposed };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view text);   // throws Errc::validation_error

/// Least-squares plane through the contact points. `frame` has its z-axis
/// along `normal` and its x-axis along the world x direction projected onto
/// the plane.
struct SupportPlane {
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Quat frame = Quat::Identity();
  double residual = 0.0;   // RMS vertical residual (m)
};

/// Fits z = a x + b y + c to the columns of `points` by minimizing vertical
/// residuals. Throws Errc::degenerate for fewer than 3 or collinear points.
SupportPlane regression_plane(const Eigen::Ref<const Mat3X>& points);

/// Planar-mode support: the line through the grasp points in the x-z plane.
SupportPlane support_line(const Eigen::Ref<const Mat3X>& points);

struct GaitConfig {
  double swing_period = 1.75;        // T_sw (s)
  std::vector<int> order;            // limb sequence within one cycle
  double stride = 0.08;              // (m)
  Vec2 heading = Vec2::UnitX();
  double step_height = 0.04;         // h_sw (m)
  double nominal_height = 0.08;      // h_n (m)
  double clearance = 0.02;           // h_add (m)
  double dwell = 0.0;                // release / grasp hold inside each phase (s)
  int path_samples = 20;             // interpolated base poses checked for collision
  bool planar = false;

  int n_limbs() const { return static_cast<int>(order.size()); }
  /// T = 2 n T_sw
  double period() const { return 2.0 * n_limbs() * swing_period; }
  void validate() const;
};

/// Height of the base for a support plane: p_c,z + h_n, raised per
///   p_c,z + h_n + max|d_coll| + h_add - b_low
/// whenever the footprint collides at the target or along the path from `from`.
Pose desired_base_pose(const SupportPlane& plane, const GaitConfig& config, const TerrainMap& map,
                       const Footprint& footprint, const std::optional<Pose>& from = std::nullopt);

/// Level base above the contact centroid at nominal height, no collision
/// handling; the baseline gait's body placement.
Pose nominal_base_pose(const Eigen::Ref<const Mat3X>& contacts, const GaitConfig& config);

/// current + stride * heading in the horizontal plane, snapped to the surface.
Vec3 next_foothold(const Vec3& current, const Vec2& heading, double stride, const TerrainMap& map);

enum class PhaseType { swing, base_adjust };

struct Phase {
  PhaseType type = PhaseType::swing;
  int limb = -1;                         // swinging limb, -1 for base adjust
  Vec3 start = Vec3::Zero();             // swing start foothold
  Vec3 target = Vec3::Zero();            // swing target foothold
  Pose base_target;                      // desired base pose at the end of the phase
  double t_start = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
};

struct GaitPlan {
  std::vector<Phase> phases;
  Pose initial_base;
  std::vector<Vec3> initial_footholds;

  double duration() const { return phases.empty() ? 0.0 : phases.back().t_end; }
};

/// Alternating swing / base-adjust phases for `n_cycles` periods. Throws
/// Errc::infeasible (with the phase index) when a planned stance cannot be
/// reached.
GaitPlan build_gait_plan(const RobotModel& model, const GaitConfig& config, const RobotState& initial,
                         int n_cycles, const TerrainMap& map, Strategy strategy);

void write_phase_table(std::ostream& out, const GaitPlan& plan);

}  // namespace climb
