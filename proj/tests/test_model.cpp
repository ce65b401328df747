#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/momentum.hpp"
#include "climb/robot_model.hpp"
#include "test_util.hpp"

namespace climb {
namespace {

using test::random_joints;
using test::random_pose;
using test::random_regular_state;

// Independent FK: chain of homogeneous transforms.
Vec3 composed_tip(const RobotModel& model, const Pose& base, int limb, const VecX& q) {
  const LimbModel& lm = model.limbs[limb];
  Eigen::Isometry3d t = Eigen::Translation3d(base.position) * base.orientation;
  t = t * Eigen::Translation3d(lm.mount_position) * Eigen::Isometry3d(lm.mount_rotation);
  for (int j = 0; j < lm.dof(); ++j)
    t = t * Eigen::AngleAxisd(q[j], lm.joints[j].axis) * Eigen::Translation3d(lm.joints[j].link);
  return t.translation();
}

Mat3 tip_rotation(const RobotModel& model, const Pose& base, int limb, const VecX& q) {
  return limb_frames(model, base, limb, q).tip_rotation;
}

TEST(Kinematics, HomeAtZeroAnglesIsSumOfLinks) {
  const RobotModel model = make_reference_quadruped();
  const VecX q = VecX::Zero(3);
  for (int i = 0; i < model.n_limbs(); ++i) {
    const LimbModel& lm = model.limbs[i];
    Vec3 sum = Vec3::Zero();
    for (const JointModel& jt : lm.joints) sum += jt.link;
    const Vec3 expected = lm.mount_position + lm.mount_rotation * sum;
    EXPECT_LE((foot_position(model, Pose{}, i, q) - expected).norm(), 1e-12);
  }
}

TEST(Kinematics, MatchesTransformComposition) {
  std::mt19937_64 rng(1);
  for (const RobotModel& model : {make_reference_quadruped(), make_planar_two_arm()})
    for (int trial = 0; trial < 20; ++trial) {
      const Pose base = random_pose(rng);
      const VecX q = random_joints(model, rng);
      for (int i = 0; i < model.n_limbs(); ++i) {
        const VecX qi = q.segment(model.offset(i), model.limb_dof(i));
        EXPECT_LE((foot_position(model, base, i, qi) - composed_tip(model, base, i, qi)).norm(), 1e-12);
        EXPECT_LE((limb_frames(model, base, i, qi).tip - composed_tip(model, base, i, qi)).norm(), 1e-12);
      }
    }
}

TEST(Kinematics, TranslationEquivariance) {
  std::mt19937_64 rng(2);
  const RobotModel model = make_reference_quadruped();
  for (int trial = 0; trial < 20; ++trial) {
    Pose base = random_pose(rng);
    const VecX q = random_joints(model, rng).head(3);
    const Vec3 d = test::random_vec(rng, 2.0);
    const Vec3 before = foot_position(model, base, 0, q);
    base.position += d;
    EXPECT_LE((foot_position(model, base, 0, q) - (before + d)).norm(), 1e-12);
  }
}

TEST(Kinematics, ForwardKinematicsPoseAgreesWithFrames) {
  std::mt19937_64 rng(3);
  const RobotModel model = make_reference_quadruped();
  const RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  for (int i = 0; i < model.n_limbs(); ++i) {
    const Pose p = forward_kinematics(model, s, i);
    const LimbFrames f = limb_frames(model, s.base, i, s.limb_q(model, i));
    EXPECT_LE((p.position - f.tip).norm(), 1e-12);
    EXPECT_LE((p.rotation() - f.tip_rotation).norm(), 1e-12);
  }
}

TEST(Kinematics, JointJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const double eps = 1e-7;
  for (const RobotModel& model : {make_reference_quadruped(), make_planar_two_arm()})
    for (int trial = 0; trial < 20; ++trial) {
      const Pose base = random_pose(rng);
      const VecX q = random_joints(model, rng);
      for (int i = 0; i < model.n_limbs(); ++i) {
        const VecX qi = q.segment(model.offset(i), model.limb_dof(i));
        const LimbJacobians jac = limb_jacobians(model, base, i, qi);
        const Mat3X jt = translational_jacobian(model, base, i, qi);
        for (int j = 0; j < model.limb_dof(i); ++j) {
          VecX qp = qi, qm = qi;
          qp[j] += eps;
          qm[j] -= eps;
          const Vec3 lin = (foot_position(model, base, i, qp) - foot_position(model, base, i, qm)) / (2 * eps);
          const Mat3 dr = tip_rotation(model, base, i, qp) * tip_rotation(model, base, i, qm).transpose();
          const Vec3 ang = log_quat<double>(Quat(dr)) / (2 * eps);
          EXPECT_LE((jac.joint.col(j).head<3>() - lin).norm(), 1e-5);
          EXPECT_LE((jac.joint.col(j).tail<3>() - ang).norm(), 1e-5);
          EXPECT_LE((jt.col(j) - lin).norm(), 1e-5);
        }
      }
    }
}

TEST(Kinematics, BaseJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double eps = 1e-7;
  const RobotModel model = make_reference_quadruped();
  for (int trial = 0; trial < 20; ++trial) {
    const Pose base = random_pose(rng);
    const VecX qi = random_joints(model, rng).head(3);
    const Mat6 jb = limb_jacobians(model, base, 0, qi).base;
    EXPECT_LE((jb.topLeftCorner<3, 3>() - Mat3::Identity()).norm(), 1e-15);
    for (int k = 0; k < 3; ++k) {
      // world angular perturbation of the base
      Pose bp = base, bm = base;
      bp.orientation = (exp_quat(Vec3(eps * Vec3::Unit(k))) * base.orientation).normalized();
      bm.orientation = (exp_quat(Vec3(-eps * Vec3::Unit(k))) * base.orientation).normalized();
      const Vec3 lin = (foot_position(model, bp, 0, qi) - foot_position(model, bm, 0, qi)) / (2 * eps);
      EXPECT_LE((jb.col(3 + k).head<3>() - lin).norm(), 1e-5);
      // linear perturbation
      bp = base;
      bm = base;
      bp.position[k] += eps;
      bm.position[k] -= eps;
      const Vec3 dl = (foot_position(model, bp, 0, qi) - foot_position(model, bm, 0, qi)) / (2 * eps);
      EXPECT_LE((jb.col(k).head<3>() - dl).norm(), 1e-5);
    }
  }
}

TEST(Kinematics, StretchedLimbIsRankDeficient) {
  const RobotModel model = make_reference_quadruped();
  const VecX stretched = VecX::Zero(3);
  const Mat3X jt = translational_jacobian(model, Pose{}, 0, stretched);
  Eigen::JacobiSVD<MatX> svd(jt);
  EXPECT_LT(svd.singularValues()[2], 1e-12);
  EXPECT_LE(manipulability(model, Pose{}, 0, stretched), 1e-12);
}

TEST(Manipulability, RotationInvariant) {
  std::mt19937_64 rng(6);
  const RobotModel model = make_reference_quadruped();
  for (int trial = 0; trial < 20; ++trial) {
    const VecX qi = random_joints(model, rng).head(3);
    const double w0 = manipulability(model, Pose{}, 0, qi);
    EXPECT_NEAR(manipulability(model, random_pose(rng), 0, qi), w0, 1e-12);
  }
}

TEST(Manipulability, PlanarArmClosedForm) {
  const RobotModel model = make_planar_two_arm();
  const double l1 = model.limbs[0].joints[0].link.norm();
  const double l2 = model.limbs[0].joints[1].link.norm();
  for (double q1 = -1.5; q1 <= 1.5; q1 += 0.25)
    for (double q2 = -3.0; q2 <= 3.0; q2 += 0.25) {
      const Eigen::Vector2d q(q1, q2);
      EXPECT_NEAR(manipulability(model, Pose{}, 0, q), l1 * l2 * std::abs(std::sin(q2)), 1e-9);
    }
}

TEST(Manipulability, NonNegativeAndZeroExactlyAtRankLoss) {
  std::mt19937_64 rng(7);
  const RobotModel model = make_reference_quadruped();
  for (int trial = 0; trial < 200; ++trial) {
    VecX qi = random_joints(model, rng).head(3);
    if (trial % 4 == 0) qi[2] = 0.0;   // elbow straight
    const double w = manipulability(model, Pose{}, 0, qi);
    const Mat3X jt = translational_jacobian(model, Pose{}, 0, qi);
    const double smin = Eigen::JacobiSVD<MatX>(jt).singularValues()[2];
    EXPECT_GE(w, 0.0);
    if (smin < 1e-12)
      EXPECT_LE(w, 1e-12);
    else
      EXPECT_GT(w, 0.0);
  }
}

TEST(InverseKinematics, RoundTrip) {
  std::mt19937_64 rng(8);
  for (const RobotModel& model : {make_reference_quadruped(), make_planar_two_arm()})
    for (int trial = 0; trial < 30; ++trial) {
      const RobotState s = random_regular_state(model, rng, 1e-4);
      for (int i = 0; i < model.n_limbs(); ++i) {
        const Vec3 target = foot_position(model, s.base, i, s.limb_q(model, i));
        const IkResult r = solve_ik(model, s.base, i, target, s.limb_q(model, i) + VecX::Constant(model.limb_dof(i), 0.1));
        ASSERT_EQ(r.status, IkStatus::ok);
        EXPECT_LE((foot_position(model, s.base, i, r.q) - target).norm(), 1e-6);
      }
    }
}

TEST(InverseKinematics, BeyondReachIsUnreachable) {
  const RobotModel model = make_reference_quadruped();
  const LimbModel& lm = model.limbs[0];
  const Vec3 far = lm.mount_position + 1.5 * lm.reach() * (lm.mount_rotation * Vec3::UnitX());
  EXPECT_EQ(solve_ik(model, Pose{}, 0, far, lm.home).status, IkStatus::unreachable);
  try {
    inverse_kinematics(model, Pose{}, 0, far);
    FAIL() << "expected unreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unreachable);
  }
}

TEST(InverseKinematics, PlanarTargetGrid) {
  const RobotModel model = make_planar_two_arm();
  const Vec3 mount = model.limbs[0].mount_position;
  int solved = 0;
  for (double x = -0.15; x <= 0.1001; x += 0.05)
    for (double z = -0.30; z <= -0.1999; z += 0.05) {
      const Vec3 target = mount + Vec3(x, 0.0, z);
      const IkResult r = solve_ik(model, Pose{}, 0, target, model.limbs[0].home);
      ASSERT_EQ(r.status, IkStatus::ok) << "target " << target.transpose();
      EXPECT_LE((foot_position(model, Pose{}, 0, r.q) - target).norm(), 1e-6);
      ++solved;
    }
  EXPECT_EQ(solved, 18);
}

TEST(Momentum, ZeroAtRest) {
  std::mt19937_64 rng(9);
  const RobotModel model = make_reference_quadruped();
  const RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  EXPECT_EQ(momentum(model, s).total.norm(), 0.0);
}

TEST(Momentum, LinearInVelocities) {
  std::mt19937_64 rng(10);
  const RobotModel model = make_reference_quadruped();
  RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  s.base_twist = Vec6::Random();
  s.qd = VecX::Random(model.dof());
  const Vec6 once = momentum(model, s).total;
  s.base_twist *= 2.0;
  s.qd *= 2.0;
  EXPECT_LE((momentum(model, s).total - 2.0 * once).norm(), 1e-12 * once.norm());
}

TEST(Momentum, TranslatingRobotCarriesTotalMassTimesVelocity) {
  std::mt19937_64 rng(11);
  const RobotModel model = make_reference_quadruped();
  RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  const Vec3 v(0.3, -0.2, 0.1);
  s.base_twist.head<3>() = v;
  const MomentumState m = momentum(model, s);
  const Vec3 expected = model.total_mass() * v;
  EXPECT_LE((m.linear() - expected).norm(), 1e-9 * expected.norm());
  EXPECT_LE(m.angular().norm(), 1e-12);
}

TEST(Momentum, MatrixClosureWithLinkSummation) {
  std::mt19937_64 rng(12);
  for (const RobotModel& model : {make_reference_quadruped(), make_planar_two_arm()})
    for (int trial = 0; trial < 20; ++trial) {
      RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
      s.base_twist = Vec6::Random();
      s.qd = VecX::Random(model.dof());
      VecX v(6 + model.dof());
      v << s.base_twist, s.qd;
      const Vec3 com = center_of_mass(model, s);
      const Vec6 via_matrix = momentum_matrix(model, s.base, s.q, com) * v;
      const MomentumState m = momentum(model, s);
      EXPECT_LE((via_matrix - m.total).norm(), 1e-12 * std::max(1.0, m.total.norm()));
      EXPECT_LE((m.base + m.support + m.swing - m.total).norm(), 1e-12 * std::max(1.0, m.total.norm()));
    }
}

TEST(Momentum, CouplingColumnsAreUnitRateMomenta) {
  std::mt19937_64 rng(13);
  const RobotModel model = make_reference_quadruped();
  RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  for (int i = 0; i < model.n_limbs(); ++i) {
    const Mat6X h = coupling_inertia(model, s, i);
    ASSERT_EQ(h.cols(), model.limb_dof(i));
    for (int j = 0; j < model.limb_dof(i); ++j) {
      s.qd.setZero();
      s.qd[model.offset(i) + j] = 1.0;
      EXPECT_LE((momentum(model, s).total - h.col(j)).norm(), 1e-12);
    }
  }
  s.qd.setZero();
  const Mat6 hb = base_inertia(model, s);
  for (int k = 0; k < 6; ++k) {
    s.base_twist = Vec6::Unit(k);
    EXPECT_LE((momentum(model, s).total - hb.col(k)).norm(), 1e-12);
  }
}

TEST(Momentum, MasslessLimbHasNoCoupling) {
  std::mt19937_64 rng(14);
  RobotModel model = make_reference_quadruped();
  for (JointModel& jt : model.limbs[1].joints) {
    jt.mass = 0.0;
    jt.inertia.setZero();
  }
  const RobotState s = RobotState::at_rest(model, random_pose(rng), random_joints(model, rng));
  EXPECT_EQ(coupling_inertia(model, s, 1).norm(), 0.0);
  EXPECT_GT(coupling_inertia(model, s, 0).norm(), 0.0);
}

TEST(RobotModel, PresetsSatisfyInvariants) {
  EXPECT_NO_THROW(make_reference_quadruped().validate());
  EXPECT_NO_THROW(make_planar_two_arm().validate());
  const RobotModel q = make_reference_quadruped();
  EXPECT_EQ(q.n_limbs(), 4);
  EXPECT_EQ(q.dof(), 12);
  EXPECT_EQ(q.offset(2), 6);
}

void expect_bad_config(const RobotModel& model) {
  try {
    model.validate();
    FAIL() << "expected bad_config";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bad_config);
  }
}

TEST(RobotModel, ValidateRejectsBrokenInvariants) {
  RobotModel m = make_reference_quadruped();
  m.limbs[0].joints[1].mass = 0.0;
  expect_bad_config(m);

  m = make_reference_quadruped();
  m.base.inertia(0, 1) = 5.0;
  expect_bad_config(m);

  m = make_reference_quadruped();
  m.limbs[2].joints[0].inertia = -Mat3::Identity();
  expect_bad_config(m);

  m = make_reference_quadruped();
  m.limbs[3].joints[2].lower = m.limbs[3].joints[2].upper;
  expect_bad_config(m);

  m = make_planar_two_arm();
  m.limbs.pop_back();
  expect_bad_config(m);

  m = make_reference_quadruped();
  m.base.mass = -1.0;
  expect_bad_config(m);
}

}  // namespace
}  // namespace climb
