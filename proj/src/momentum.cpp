#include "climb/momentum.hpp"

#include "climb/kinematics.hpp"

namespace climb {

Vec3 center_of_mass(const RobotModel& model, const Pose& base, const VecX& q) {
  Vec3 weighted = model.base.mass * base.position;
  for (int i = 0; i < model.n_limbs(); ++i) {
    const LimbFrames f = limb_frames(model, base, i, q.segment(model.offset(i), model.limb_dof(i)));
    for (int j = 0; j < model.limb_dof(i); ++j) weighted += model.limbs[i].joints[j].mass * f.link_com[j];
  }
  return weighted / model.total_mass();
}

Vec3 center_of_mass(const RobotModel& model, const RobotState& state) {
  return center_of_mass(model, state.base, state.q);
}

namespace {

// Adds the contribution of one rigid body (mass m, COM r, world inertia iw)
// to the base columns of the momentum matrix.
void add_base_columns(Eigen::Ref<Mat6> cols, double m, const Vec3& r, const Mat3& iw,
                      const Vec3& base_origin, const Vec3& reference) {
  const Mat3 arm = skew(r - base_origin);
  const Mat3 lever = skew(r - reference);
  cols.topLeftCorner<3, 3>() += m * Mat3::Identity();
  cols.topRightCorner<3, 3>() -= m * arm;
  cols.bottomLeftCorner<3, 3>() += m * lever;
  cols.bottomRightCorner<3, 3>() += iw - m * lever * arm;
}

void add_limb_columns(Eigen::Ref<Mat6X> cols, const RobotModel& model, int limb, const LimbFrames& f,
                      const Vec3& reference) {
  const auto& joints = model.limbs[limb].joints;
  const int k = static_cast<int>(joints.size());
  for (int b = 0; b < k; ++b) {
    const double m = joints[b].mass;
    const Vec3& r = f.link_com[b];
    const Mat3 iw = f.link_rotation[b] * joints[b].inertia * f.link_rotation[b].transpose();
    const Vec3 lever = r - reference;
    for (int j = 0; j <= b; ++j) {
      const Vec3 v = f.joint_axis[j].cross(r - f.joint_origin[j]);
      cols.col(j).head<3>() += m * v;
      cols.col(j).tail<3>() += m * lever.cross(v) + iw * f.joint_axis[j];
    }
  }
}

}  // namespace

Mat6X momentum_matrix(const RobotModel& model, const Pose& base, const VecX& q,
                      const Vec3& reference) {
  Mat6X a = Mat6X::Zero(6, 6 + model.dof());
  const Mat3 rb = base.rotation();
  add_base_columns(a.leftCols<6>(), model.base.mass, base.position,
                   rb * model.base.inertia * rb.transpose(), base.position, reference);
  for (int i = 0; i < model.n_limbs(); ++i) {
    const int k = model.limb_dof(i);
    const LimbFrames f = limb_frames(model, base, i, q.segment(model.offset(i), k));
    for (int b = 0; b < k; ++b) {
      const Mat3 iw = f.link_rotation[b] * model.limbs[i].joints[b].inertia * f.link_rotation[b].transpose();
      add_base_columns(a.leftCols<6>(), model.limbs[i].joints[b].mass, f.link_com[b], iw, base.position,
                       reference);
    }
    add_limb_columns(a.middleCols(6 + model.offset(i), k), model, i, f, reference);
  }
  return a;
}

Mat6 base_inertia(const RobotModel& model, const RobotState& state) {
  const Vec3 com = center_of_mass(model, state);
  return momentum_matrix(model, state.base, state.q, com).leftCols<6>();
}

Mat6X coupling_inertia(const RobotModel& model, const Pose& base, int limb,
                       const Eigen::Ref<const VecX>& q_limb, const Vec3& reference) {
  const int k = model.limb_dof(limb);
  const LimbFrames f = limb_frames(model, base, limb, q_limb);
  Mat6X h = Mat6X::Zero(6, k);
  add_limb_columns(h, model, limb, f, reference);
  return h;
}

Mat6X coupling_inertia(const RobotModel& model, const RobotState& state, int limb) {
  return coupling_inertia(model, state.base, limb, state.limb_q(model, limb),
                          center_of_mass(model, state));
}

MomentumState momentum(const RobotModel& model, const RobotState& state) {
  return momentum(model, state, state.attached, center_of_mass(model, state));
}

MomentumState momentum(const RobotModel& model, const RobotState& state,
                       const std::vector<bool>& supporting, const Vec3& reference) {
  MomentumState out;
  out.reference = reference;
  const Vec3 vb = state.base_twist.head<3>();
  const Vec3 wb = state.base_twist.tail<3>();
  const Vec3& pb = state.base.position;

  // Momentum of a body moving with (v, w): [m v; (r - ref) x m v + I w].
  auto body = [&](double m, const Vec3& r, const Mat3& iw, const Vec3& v, const Vec3& w) {
    Vec6 l;
    l.head<3>() = m * v;
    l.tail<3>() = (r - reference).cross(m * v) + iw * w;
    return l;
  };

  const Mat3 rb = state.base.rotation();
  out.base += body(model.base.mass, pb, rb * model.base.inertia * rb.transpose(), vb, wb);

  for (int i = 0; i < model.n_limbs(); ++i) {
    const int k = model.limb_dof(i);
    const LimbFrames f = limb_frames(model, state.base, i, state.limb_q(model, i));
    const auto qd = state.limb_qd(model, i);
    Vec6& bucket = (i < static_cast<int>(supporting.size()) && supporting[i]) ? out.support : out.swing;
    Vec3 w_joint = Vec3::Zero();
    for (int b = 0; b < k; ++b) {
      const auto& jt = model.limbs[i].joints[b];
      const Vec3& r = f.link_com[b];
      const Mat3 iw = f.link_rotation[b] * jt.inertia * f.link_rotation[b].transpose();
      // velocity due to the base twist alone
      out.base += body(jt.mass, r, iw, vb + wb.cross(r - pb), wb);
      // velocity due to this limb's joint rates
      w_joint += qd[b] * f.joint_axis[b];
      Vec3 v_joint = Vec3::Zero();
      for (int j = 0; j <= b; ++j) v_joint += qd[j] * f.joint_axis[j].cross(r - f.joint_origin[j]);
      bucket += body(jt.mass, r, iw, v_joint, w_joint);
    }
  }
  out.total = out.base + out.support + out.swing;
  return out;
}

}  // namespace climb
