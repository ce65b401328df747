#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "climb/bezier.hpp"
#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/momentum.hpp"
#include "climb/motion.hpp"
#include "climb/scenario.hpp"
#include "test_util.hpp"

namespace climb {
namespace {

// First swing of the reference quadruped scenario.
struct SwingFixture {
  Scenario scenario = load_scenario(test::scenario_path("quadruped_proposed"));
  TerrainMap map = build_terrain(scenario);
  RobotState initial = initial_state(scenario, map);
  GaitPlan plan = build_gait_plan(scenario.robot, scenario.gait, initial, 1, map, scenario.strategy);

  SwingProblem problem() const {
    const Phase& p = plan.phases.front();
    Mat3X contacts(3, 4);
    for (int i = 0; i < 4; ++i) contacts.col(i) = initial.anchors[i];
    return SwingProblem::from_state(scenario.robot, initial, p.limb, p.start, p.target,
                                    regression_plane(contacts).normal, p.t_start, p.t_end);
  }

  LrstConfig fast_lrst() const {
    LrstConfig c = scenario.lrst;
    c.samples = 32;
    c.restarts = 2;
    c.max_iterations = 400;
    return c;
  }
};

const SwingFixture& fixture() {
  static const SwingFixture f;
  return f;
}

TEST(Bezier, BernsteinPartitionOfUnity) {
  for (int n : {1, 3, 7})
    for (double s = 0.0; s <= 1.0; s += 0.05) {
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) {
        EXPECT_GE(bernstein(n, j, s), 0.0);
        sum += bernstein(n, j, s);
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
    }
}

TEST(Bezier, SwingCurveBoundaryConditions) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 a = test::random_vec(rng), b = test::random_vec(rng);
    const SwingTrajectory c =
        make_swing_curve<double>(a, b, test::random_vec(rng), test::random_vec(rng), 2.0, 3.75);
    EXPECT_LE((c.position(2.0) - a).norm(), 1e-12);
    EXPECT_LE((c.position(3.75) - b).norm(), 1e-12);
    for (double t : {2.0, 3.75}) {
      EXPECT_LE(c.velocity(t).norm(), 1e-9);
      EXPECT_LE(c.acceleration(t).norm(), 1e-9);
    }
  }
}

TEST(Bezier, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(32);
  const SwingTrajectory c = make_swing_curve<double>(test::random_vec(rng), test::random_vec(rng),
                                                     test::random_vec(rng), test::random_vec(rng), 0.0, 1.75);
  const double h = 1e-5;
  for (double t = 0.1; t < 1.7; t += 0.2) {
    EXPECT_LE((c.velocity(t) - (c.position(t + h) - c.position(t - h)) / (2 * h)).norm(), 1e-6);
    EXPECT_LE((c.acceleration(t) - (c.velocity(t + h) - c.velocity(t - h)) / (2 * h)).norm(), 1e-5);
  }
}

TEST(Bezier, SeedControlPointsPutApexAtStepHeight) {
  const SwingProblem p = fixture().problem();
  const auto [a3, a4] = seed_control_points(p, 0.04);
  const SwingTrajectory c = make_swing_curve<double>(p.start, p.goal, a3, a4, p.t0, p.tf);
  EXPECT_NEAR(swing_height(c.position(0.5 * (p.t0 + p.tf)), p.start, p.goal, p.up), 0.04, 1e-12);
}

TEST(BaselineSwing, RestToRestWithApexAtStepHeight) {
  const Vec3 a(0.1, 0.2, 0.0), b(0.18, 0.2, 0.01);
  const BaselineSwing s(a, b, Vec3::UnitZ(), 0.04, 1.0, 2.75);
  EXPECT_LE((s.position(1.0) - a).norm(), 1e-15);
  EXPECT_LE((s.position(2.75) - b).norm(), 1e-15);
  EXPECT_LE(s.velocity(1.0).norm(), 1e-15);
  EXPECT_LE(s.velocity(2.75).norm(), 1e-15);
  EXPECT_NEAR(swing_height(s.position(1.875), a, b, Vec3::UnitZ()), 0.04, 1e-15);
}

// Reference cost: momentum summed link by link with the base frozen.
LrstTerms oracle_terms(const SwingProblem& p, const SwingPath& path, const LrstConfig& c) {
  const RobotModel& model = *p.model;
  const int n = c.samples;
  const double h = (p.tf - p.t0) / (n - 1);
  const int k = model.limb_dof(p.limb);
  MatX q(k, n);
  VecX seed = p.seed;
  double apex = -1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = path_position(path, p.t0 + i * h);
    const IkResult r = solve_ik(model, p.base, p.limb, x, seed);
    EXPECT_EQ(r.status, IkStatus::ok);
    q.col(i) = seed = r.q;
    apex = std::max(apex, swing_height(x, p.start, p.goal, p.up));
  }
  auto diff = [h](const MatX& f) {
    MatX d(f.rows(), f.cols());
    const Eigen::Index m = f.cols();
    d.col(0) = (-3 * f.col(0) + 4 * f.col(1) - f.col(2)) / (2 * h);
    d.col(m - 1) = (3 * f.col(m - 1) - 4 * f.col(m - 2) + f.col(m - 3)) / (2 * h);
    for (Eigen::Index i = 1; i + 1 < m; ++i) d.col(i) = (f.col(i + 1) - f.col(i - 1)) / (2 * h);
    return d;
  };
  const MatX qd = diff(q);
  RobotState s = RobotState::at_rest(model, p.base, model.home());
  std::vector<bool> supporting(model.n_limbs(), true);
  supporting[p.limb] = false;
  MatX mom(6, n);
  for (int i = 0; i < n; ++i) {
    s.q.segment(model.offset(p.limb), k) = q.col(i);
    s.qd.setZero();
    s.qd.segment(model.offset(p.limb), k) = qd.col(i);
    mom.col(i) = momentum(model, s, supporting, p.reference).total;
  }
  const MatX rate = diff(mom);
  LrstTerms t;
  t.feasible = true;
  t.max_lin_rate = rate.topRows(3).cwiseAbs().maxCoeff();
  t.max_ang_rate = rate.bottomRows(3).cwiseAbs().maxCoeff();
  t.peak_rate = rate.colwise().norm().maxCoeff();
  t.apex = apex;
  t.cost = c.c_lin * t.max_lin_rate + c.c_ang * t.max_ang_rate + c.c_height * std::abs(c.step_height - apex);
  return t;
}

TEST(Lrst, ObjectiveMatchesIndependentOracle) {
  const SwingProblem p = fixture().problem();
  const LrstConfig c = fixture().scenario.lrst;
  std::mt19937_64 rng(33);
  auto [a3, a4] = seed_control_points(p, c.step_height);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 b3 = a3 + test::random_vec(rng, 0.01), b4 = a4 + test::random_vec(rng, 0.01);
    const SwingPath path = make_swing_curve<double>(p.start, p.goal, b3, b4, p.t0, p.tf);
    const LrstTerms got = lrst_terms(p, path, c);
    const LrstTerms want = oracle_terms(p, path, c);
    ASSERT_TRUE(got.feasible);
    EXPECT_NEAR(got.max_lin_rate, want.max_lin_rate, 1e-9 * want.max_lin_rate + 1e-15);
    EXPECT_NEAR(got.max_ang_rate, want.max_ang_rate, 1e-9 * want.max_ang_rate + 1e-15);
    EXPECT_NEAR(got.peak_rate, want.peak_rate, 1e-9 * want.peak_rate + 1e-15);
    EXPECT_NEAR(got.apex, want.apex, 1e-12);
    EXPECT_NEAR(got.cost, want.cost, 1e-9 * want.cost);
    EXPECT_NEAR(lrst_objective(p, b3, b4, c), got.cost, 1e-15);
  }
}

TEST(Lrst, ZeroLengthSwingCostsOnlyTheHeightTerm) {
  SwingProblem p = fixture().problem();
  p.goal = p.start;
  const LrstConfig c = fixture().scenario.lrst;
  const LrstTerms t = lrst_terms(p, make_swing_curve<double>(p.start, p.start, p.start, p.start, p.t0, p.tf), c);
  ASSERT_TRUE(t.feasible);
  EXPECT_LE(t.max_lin_rate + t.max_ang_rate, 1e-12);
  EXPECT_NEAR(t.cost, c.c_height * c.step_height, 1e-10);
}

TEST(Lrst, InfeasiblePathGetsInfiniteCost) {
  const SwingProblem p = fixture().problem();
  const LrstConfig c = fixture().scenario.lrst;
  const Vec3 far = p.start + Vec3(0.0, 0.0, 5.0);
  const SwingPath path = make_swing_curve<double>(p.start, p.goal, far, far, p.t0, p.tf);
  EXPECT_FALSE(lrst_terms(p, path, c).feasible);
  EXPECT_TRUE(std::isinf(lrst_terms(p, path, c).cost));
  try {
    lrst_objective(p, far, far, c);
    FAIL() << "expected infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible);
  }
}

TEST(Lrst, HeightOnlyWeightsHitTheStepHeight) {
  LrstConfig c = fixture().fast_lrst();
  c.c_lin = c.c_ang = 0.0;
  const SwingSolution sol = optimize_swing(fixture().problem(), c);
  EXPECT_NEAR(sol.terms.apex, c.step_height, 1e-3);
}

TEST(Lrst, OptimizerHistoryDescendsBelowBaseline) {
  const LrstConfig c = fixture().fast_lrst();
  const SwingProblem p = fixture().problem();
  const SwingSolution sol = optimize_swing(p, c);
  ASSERT_FALSE(sol.history.empty());
  for (std::size_t i = 1; i < sol.history.size(); ++i) EXPECT_LE(sol.history[i], sol.history[i - 1]);
  EXPECT_LE(sol.terms.cost, sol.baseline.cost);
  EXPECT_GE(sol.feasible_restarts, 1);
  // optimized trajectory is a proper swing curve between the footholds
  EXPECT_LE((sol.trajectory.position(p.t0) - p.start).norm(), 1e-12);
  EXPECT_LE((sol.trajectory.position(p.tf) - p.goal).norm(), 1e-12);
}

TEST(Lrst, OptimizerIsDeterministic) {
  const LrstConfig c = fixture().fast_lrst();
  const SwingSolution a = optimize_swing(fixture().problem(), c);
  const SwingSolution b = optimize_swing(fixture().problem(), c);
  EXPECT_TRUE(a.trajectory.controls() == b.trajectory.controls());
  EXPECT_EQ(a.terms.cost, b.terms.cost);
}

TEST(DistributionFactor, MapsManipulabilityWindow) {
  MdConfig c;
  c.w_min = 0.001;
  c.w_max = 0.003;
  EXPECT_EQ(distribution_factor(0.001, c), 0.0);
  EXPECT_EQ(distribution_factor(0.003, c), 1.0);
  EXPECT_NEAR(distribution_factor(0.002, c), 0.5, 1e-12);
  EXPECT_EQ(distribution_factor(0.0, c), 0.0);
  EXPECT_EQ(distribution_factor(1.0, c), 1.0);
  c.fixed_alpha = 0.3;
  EXPECT_EQ(distribution_factor(0.0, c), 0.3);
}

TEST(DistributionFactor, UsesWeakestSupportLimb) {
  const RobotModel model = make_reference_quadruped();
  std::mt19937_64 rng(34);
  const RobotState s = RobotState::at_rest(model, Pose{}, test::random_joints(model, rng));
  MdConfig c;
  c.w_min = 0.0;
  c.w_max = 1.0;
  double w = 1e9;
  for (int i : {1, 2, 3}) w = std::min(w, manipulability(model, s, i));
  EXPECT_NEAR(distribution_factor(model, s, {1, 2, 3}, c), w, 1e-15);
}

struct MdCase {
  RobotModel model = make_reference_quadruped();
  RobotState state;
  std::vector<int> swing{0}, support{1, 2, 3};

  explicit MdCase(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    state = test::random_regular_state(model, rng, 1e-4);
    state.qd.setZero();
    state.qd.segment(model.offset(0), 3) = Eigen::Vector3d::Random();
  }
};

TEST(MomentumDistribution, ZeroAlphaOrZeroSwingGivesZero) {
  MdCase c(35);
  EXPECT_EQ(md_base_velocity(c.model, c.state, c.swing, c.support, 0.0).norm(), 0.0);
  c.state.qd.setZero();
  EXPECT_LE(md_base_velocity(c.model, c.state, c.swing, c.support, 1.0).norm(), 1e-15);
}

TEST(MomentumDistribution, LinearInAlpha) {
  const MdCase c(36);
  const Vec6 one = md_base_velocity(c.model, c.state, c.swing, c.support, 1.0);
  for (double a : {0.1, 0.37, 0.8})
    EXPECT_LE((md_base_velocity(c.model, c.state, c.swing, c.support, a) - a * one).norm(), 1e-12 * std::max(1.0, one.norm()));
}

// Momentum of the whole robot once the base and support limbs follow the
// distributed twist, relative to the swing momentum alone.
double closure_ratio(const MdCase& c, double alpha) {
  RobotState s = c.state;
  const Vec6 twist = md_base_velocity(c.model, s, c.swing, c.support, alpha);
  s.base_twist = twist;
  for (int i : c.support) s.qd.segment(c.model.offset(i), 3) = support_joint_rates(c.model, s, i, twist);
  std::vector<bool> supporting(4, true);
  supporting[0] = false;
  const MomentumState m = momentum(c.model, s, supporting, center_of_mass(c.model, s));
  return m.total.norm() / m.swing.norm();
}

TEST(MomentumDistribution, FullDistributionCancelsMomentum) {
  for (std::uint64_t seed = 40; seed < 50; ++seed) EXPECT_LE(closure_ratio(MdCase(seed), 1.0), 1e-9);
}

TEST(MomentumDistribution, PartialDistributionLeavesRemainder) {
  // with alpha = 0.4 the robot keeps 60% of the swing momentum
  const MdCase c(51);
  EXPECT_NEAR(closure_ratio(c, 0.4), 0.6, 1e-9);
}

TEST(MomentumDistribution, SupportRatesHoldGrippers) {
  const MdCase c(52);
  RobotState s = c.state;
  const Vec6 twist = md_base_velocity(c.model, s, c.swing, c.support, 1.0);
  s.base_twist = twist;
  for (int i : c.support) {
    const VecX qd = support_joint_rates(c.model, s, i, twist);
    const LimbJacobians jac = limb_jacobians(c.model, s, i);
    EXPECT_LE((jac.base.topRows<3>() * twist + jac.joint.topRows<3>() * qd).norm(), 1e-12);
  }
}

TEST(SupportTrajectory, ConstantWhenAlreadyThere) {
  Pose p;
  p.position = Vec3(0.1, 0.2, 0.3);
  p.orientation = exp_quat(Vec3(0.1, 0.2, -0.1));
  const PoseTrajectory t = support_phase_base_trajectory(p, p, 1.0, 1.75);
  for (double s = 1.0; s <= 2.75; s += 0.25) {
    EXPECT_LE((t.pose(s).position - p.position).norm(), 1e-15);
    EXPECT_LE(t.pose(s).orientation.angularDistance(p.orientation), 1e-12);
    EXPECT_LE(t.twist(s).norm(), 1e-15);
  }
}

TEST(SupportTrajectory, QuinticMidpointAndRestEnds) {
  Pose a, b;
  a.position = Vec3(0.0, 0.0, 0.06);
  b.position = Vec3(0.02, 0.0, 0.09);
  b.orientation = exp_quat(Vec3(0.0, 0.1, 0.0));
  const PoseTrajectory t = support_phase_base_trajectory(a, b, 2.0, 1.75);
  EXPECT_NEAR(t.pose(2.875).position.z(), 0.5 * (0.06 + 0.09), 1e-15);
  EXPECT_LE((t.pose(3.75).position - b.position).norm(), 1e-15);
  EXPECT_LE(t.pose(3.75).orientation.angularDistance(b.orientation), 1e-12);
  EXPECT_LE(t.twist(2.0).norm() + t.twist(3.75).norm(), 1e-15);
  EXPECT_THROW(support_phase_base_trajectory(a, b, 0.0, 0.0), Error);
}

MotionConfig motion_config(const Scenario& s) {
  MotionConfig m;
  m.strategy = s.strategy;
  m.lrst = s.lrst;
  m.md = s.md;
  m.dt = s.sim.step;
  return m;
}

TEST(AssembleMotion, QuadrupedCycleTimeline) {
  const SwingFixture& f = fixture();
  const MotionTimeline tl = assemble_motion(f.plan, f.scenario.robot, f.scenario.gait, motion_config(f.scenario),
                                            f.initial, &f.map);
  EXPECT_NEAR(tl.duration(), 14.0, 1e-9);
  EXPECT_EQ(tl.size(), 14001u);
  EXPECT_EQ(tl.swings.size(), 4u);
  EXPECT_EQ(tl.q.cols(), static_cast<Eigen::Index>(tl.size()));
  // one release and one grasp per swing
  EXPECT_EQ(tl.commands.size(), 8u);
  for (const SwingRecord& r : tl.swings) {
    ASSERT_TRUE(r.solution.has_value());
    const SwingTrajectory& c = r.solution->trajectory;
    EXPECT_LE(c.velocity(c.t0()).norm() + c.velocity(c.tf()).norm(), 1e-9);
    EXPECT_LE(c.acceleration(c.t0()).norm() + c.acceleration(c.tf()).norm(), 1e-9);
  }
  // the timeline base never touches the ground
  const Footprint fp = Footprint::of(f.scenario.robot);
  for (std::size_t k = 0; k < tl.size(); k += 10) EXPECT_EQ(base_collision_depth(f.map, tl.base[k], fp).max_penetration, 0.0);
}

TEST(AssembleMotion, ZeroAlphaKeepsBaseStillDuringSwings) {
  const SwingFixture& f = fixture();
  MotionConfig m = motion_config(f.scenario);
  m.md.fixed_alpha = 0.0;
  m.lrst = f.fast_lrst();
  GaitPlan plan = f.plan;
  plan.phases.resize(2);
  const MotionTimeline tl = assemble_motion(plan, f.scenario.robot, f.scenario.gait, m, f.initial, &f.map);
  for (std::size_t k = 0; k < tl.size(); ++k) {
    if (tl.phase[k] != 0) continue;
    EXPECT_LE((tl.base[k].position - f.initial.base.position).norm(), 1e-12);
    EXPECT_LE(tl.base[k].orientation.angularDistance(f.initial.base.orientation), 1e-12);
    EXPECT_EQ(tl.alpha[k], 0.0);
  }
}

TEST(AssembleMotion, PlanarPhaseStructure) {
  const Scenario s = load_scenario(test::scenario_path("planar_proposed"));
  const TerrainMap map = build_terrain(s);
  const RobotState init = initial_state(s, map);
  const GaitPlan plan = build_gait_plan(s.robot, s.gait, init, 1, map, s.strategy);
  const MotionTimeline tl = assemble_motion(plan, s.robot, s.gait, motion_config(s), init, &map);
  EXPECT_NEAR(tl.duration(), 40.0, 1e-9);
  ASSERT_EQ(tl.swings.size(), 2u);
  EXPECT_EQ(tl.swings[0].limb, 0);
  EXPECT_EQ(tl.swings[1].limb, 1);
  for (std::size_t k = 0; k < tl.size(); ++k) {
    EXPECT_EQ(tl.phase[k], static_cast<int>(std::min(3.0, std::floor(tl.t[k] / 10.0 + 1e-9))));
    // fixed alpha during the moving part of swings, zero elsewhere
    const bool swinging = tl.phase[k] % 2 == 0 && std::fmod(tl.t[k], 10.0) >= 5.0 - 1e-9;
    if (!swinging) EXPECT_EQ(tl.alpha[k], 0.0);
    // planar motion stays in the x-z plane
    EXPECT_LE(std::abs(tl.base[k].position.y()), 1e-12);
  }
}

}  // namespace
}  // namespace climb
