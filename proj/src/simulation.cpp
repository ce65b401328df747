#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "climb/csv.hpp"
#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/scenario.hpp"
#include "climb/sim.hpp"

namespace climb {

std::string_view to_string(EventType type) noexcept {
  switch (type) {
    case EventType::release: return "release";
    case EventType::grasp: return "grasp";
    case EventType::missed_grasp: return "missed_grasp";
    case EventType::detachment: return "detachment";
  }
  return "unknown";
}

namespace {

JointReference reference_at(const MotionTimeline& tl, std::size_t k) {
  const auto last = static_cast<Eigen::Index>(tl.size() - 1);
  const auto i = static_cast<Eigen::Index>(k);
  const double dt = tl.dt;
  JointReference ref;
  ref.q = tl.q.col(i);
  if (last < 2) {
    ref.qd = ref.qdd = VecX::Zero(ref.q.size());
  } else if (i == 0) {
    ref.qd = (tl.q.col(1) - tl.q.col(0)) / dt;
    ref.qdd = (tl.q.col(2) - 2.0 * tl.q.col(1) + tl.q.col(0)) / (dt * dt);
  } else if (i == last) {
    ref.qd = (tl.q.col(last) - tl.q.col(last - 1)) / dt;
    ref.qdd = VecX::Zero(ref.q.size());
  } else {
    ref.qd = (tl.q.col(i + 1) - tl.q.col(i - 1)) / (2.0 * dt);
    ref.qdd = (tl.q.col(i + 1) - 2.0 * tl.q.col(i) + tl.q.col(i - 1)) / (dt * dt);
  }
  return ref;
}

Mat3X attached_anchors(const ContactModel& contact) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < contact.attached.size(); ++i)
    if (contact.attached[i]) pts.push_back(contact.anchors[i]);
  Mat3X m(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

}  // namespace

SimTrace simulate(const RobotModel& model, const RobotState& initial, const MotionTimeline& timeline,
                  ContactModel contact, const SimConfig& config, const TerrainMap* terrain) {
  config.validate();
  contact.validate();
  if (timeline.size() < 2) throw Error(Errc::validation_error, "timeline is empty");
  if (std::abs(timeline.dt - config.step) > 1e-15)
    throw Error(Errc::validation_error, "step: must equal the timeline step");

  const int n = model.n_limbs();
  const double dt = config.step;
  std::size_t n_steps = timeline.size() - 1;
  if (config.duration > 0.0) n_steps = std::min<std::size_t>(n_steps, std::lround(config.duration / dt));

  DynamicsState st = DynamicsState::from_robot(model, initial);
  const Footprint footprint = Footprint::of(model);

  // Supporting-limb references are re-solved against the grasped anchors,
  // expressed in the planned world: at every grasp the current base is
  // registered onto the planned base.
  std::vector<Vec3> anchor_ref = contact.anchors;
  auto register_anchors = [&](std::size_t k) {
    const Pose& planned = timeline.base[k];
    const Pose& actual = st.robot.base;
    for (int i = 0; i < n; ++i)
      if (contact.attached[i])
        anchor_ref[i] = planned.transform(actual.orientation.conjugate() * (contact.anchors[i] - actual.position));
  };
  register_anchors(0);

  SimTrace tr;
  tr.n_grippers = n;
  auto record = [&](const StepRecord* rec, const GiaMargin& gia) {
    const RobotState& r = st.robot;
    tr.t.push_back(st.t);
    tr.base.push_back(r.base);
    tr.base_twist.push_back(r.base_twist);
    tr.base_accel.push_back(rec ? rec->base_accel : Vec6::Zero());
    tr.q.push_back(r.q);
    tr.force.push_back(rec ? rec->gripper_force : std::vector<Vec3>(n, Vec3::Zero()));
    double fmax = 0.0, pmax = 0.0;
    if (rec)
      for (int i = 0; i < n; ++i) {
        fmax = std::max(fmax, rec->gripper_force[i].norm());
        pmax = std::max(pmax, rec->pull[i]);
      }
    tr.max_force.push_back(fmax);
    tr.max_pull.push_back(pmax);
    tr.gia.push_back(gia.margin);
    tr.gia_fallback.push_back(gia.no_intersection);
    tr.momentum.push_back(st.momentum);
  };
  auto margin = [&](const Vec3& com_accel) {
    const Mat3X pts = attached_anchors(contact);
    GiaMargin g;
    if (pts.cols() < (model.planar ? 2 : 3)) {
      g.margin = std::numeric_limits<double>::quiet_NaN();
      return g;
    }
    try {
      return gia_margin(model, st.robot, pts, com_accel, config.gravity(), contact.hold_force);
    } catch (const Error&) {
      g.margin = std::numeric_limits<double>::quiet_NaN();
      return g;
    }
  };

  st.t = timeline.t[0];
  record(nullptr, margin(config.gravity() * 0.0));

  std::size_t next_cmd = 0;
  std::vector<VecX> ik_seed(n);
  for (int i = 0; i < n; ++i) ik_seed[i] = st.robot.limb_q(model, i);

  bool failed = false;
  for (std::size_t k = 0; k < n_steps && !(failed && config.stop_on_failure); ++k) {
    while (next_cmd < timeline.commands.size() &&
           std::lround(timeline.commands[next_cmd].t / dt) <= static_cast<long>(k)) {
      const ContactCommand& cmd = timeline.commands[next_cmd++];
      if (!cmd.grasp) {
        contact.release(cmd.limb);
        tr.events.push_back({st.t, EventType::release, cmd.limb, 0.0});
        continue;
      }
      const Vec3 tip = foot_position(model, st.robot.base, cmd.limb, st.robot.limb_q(model, cmd.limb));
      const double miss = (tip - cmd.target).norm();
      if (miss <= config.grasp_tolerance) {
        const Vec3 normal = terrain && terrain->contains(tip.x(), tip.y()) ? terrain->surface_normal(tip.x(), tip.y())
                                                                             : Vec3(-config.gravity_direction.normalized());
        contact.attach(cmd.limb, tip, normal);
        register_anchors(k);
        tr.events.push_back({st.t, EventType::grasp, cmd.limb, miss});
      } else {
        tr.events.push_back({st.t, EventType::missed_grasp, cmd.limb, miss});
        failed = true;
      }
    }
    if (failed && config.stop_on_failure) {
      tr.stopped_early = true;
      break;
    }

    JointReference ref = reference_at(timeline, k);
    for (int i = 0; i < n; ++i) {
      if (!contact.attached[i]) continue;
      const IkResult ik = solve_ik(model, timeline.base[k], i, anchor_ref[i], ik_seed[i]);
      if (ik.status != IkStatus::ok) continue;
      ik_seed[i] = ik.q;
      ref.q.segment(model.offset(i), model.limb_dof(i)) = ik.q;
    }

    const StepRecord rec = step_dynamics(model, st, ref, contact, config, terrain, terrain ? &footprint : nullptr);
    for (int i : rec.detached) {
      tr.events.push_back({st.t, EventType::detachment, i, rec.pull[i]});
      failed = true;
    }
    record(&rec, margin(rec.com_accel));
    if (failed && config.stop_on_failure && k + 1 < n_steps) tr.stopped_early = true;
  }
  return tr;
}

RunSummary summarize(const SimTrace& trace, const MotionTimeline& timeline, const GaitConfig& gait,
                     const LrstConfig& lrst) {
  RunSummary s;
  if (trace.size() == 0) return s;
  s.duration = trace.t.back() - trace.t.front();
  for (const SimEvent& e : trace.events) {
    if (e.type == EventType::detachment) s.detachments.push_back(e);
    if (e.type == EventType::missed_grasp) s.missed_grasps.push_back(e);
  }
  s.completed = !trace.stopped_early;
  s.success = s.completed && s.detachments.empty() && s.missed_grasps.empty();

  s.max_force = *std::max_element(trace.max_force.begin(), trace.max_force.end());
  s.max_pull = *std::max_element(trace.max_pull.begin(), trace.max_pull.end());
  s.min_gia = std::numeric_limits<double>::infinity();
  for (double g : trace.gia)
    if (std::isfinite(g)) s.min_gia = std::min(s.min_gia, g);
  for (const Vec6& a : trace.base_accel) {
    s.peak_base_linear_accel = std::max(s.peak_base_linear_accel, a.head<3>().norm());
    s.peak_base_angular_accel = std::max(s.peak_base_angular_accel, a.tail<3>().norm());
  }

  const double period = gait.period();
  const double dt = timeline.dt;
  if (period > 0.0) {
    s.cycles_completed = static_cast<int>(std::floor((s.duration + 0.5 * dt) / period));
    if (s.cycles_completed > 0) {
      const auto k = static_cast<std::size_t>(std::lround(s.cycles_completed * period / dt));
      const Vec3 heading = Vec3(gait.heading.x(), gait.heading.y(), 0.0).normalized();
      const double travel = (trace.base[k].position - trace.base[0].position).dot(heading);
      s.mean_forward_velocity = travel / (trace.t[k] - trace.t[0]);
    }
  }

  s.alpha_reductions = timeline.alpha_reductions;
  if (!timeline.swings.empty()) {
    for (const SwingRecord& r : timeline.swings) {
      s.mean_peak_rate += r.terms.peak_rate;
      s.mean_baseline_peak_rate += r.baseline.peak_rate;
      s.max_apex_error = std::max(s.max_apex_error, std::abs(r.terms.apex - lrst.step_height));
    }
    s.mean_peak_rate /= static_cast<double>(timeline.swings.size());
    s.mean_baseline_peak_rate /= static_cast<double>(timeline.swings.size());
  }
  return s;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  auto line = [&](const char* key, double v) {
    out << key << ": ";
    put_number(out, v);
    out << '\n';
  };
  out << "completed: " << (s.completed ? "true" : "false") << '\n';
  out << "success: " << (s.success ? "true" : "false") << '\n';
  line("duration_s", s.duration);
  out << "detachments: " << s.detachments.size() << '\n';
  if (!s.detachments.empty()) {
    line("first_detachment_t", s.detachments.front().t);
    out << "first_detachment_limb: " << s.detachments.front().limb << '\n';
  }
  out << "missed_grasps: " << s.missed_grasps.size() << '\n';
  if (!s.missed_grasps.empty()) {
    line("first_missed_grasp_t", s.missed_grasps.front().t);
    out << "first_missed_grasp_limb: " << s.missed_grasps.front().limb << '\n';
    line("first_missed_grasp_distance_m", s.missed_grasps.front().value);
  }
  line("max_contact_force_n", s.max_force);
  line("max_pull_force_n", s.max_pull);
  line("min_gia_margin_m", s.min_gia);
  out << "cycles_completed: " << s.cycles_completed << '\n';
  line("mean_forward_velocity_m_s", s.mean_forward_velocity);
  line("peak_base_linear_accel_m_s2", s.peak_base_linear_accel);
  line("peak_base_angular_accel_rad_s2", s.peak_base_angular_accel);
  out << "alpha_reductions: " << s.alpha_reductions << '\n';
  line("mean_swing_peak_momentum_rate", s.mean_peak_rate);
  line("mean_baseline_peak_momentum_rate", s.mean_baseline_peak_rate);
  line("max_apex_error_m", s.max_apex_error);
}

namespace {

// Event labels per sample; an event belongs to the first sample at or after it.
std::vector<std::string> event_labels(const SimTrace& trace) {
  std::vector<std::string> labels(trace.size());
  std::size_t k = 0;
  for (const SimEvent& e : trace.events) {
    while (k + 1 < trace.size() && trace.t[k] < e.t - 1e-12) ++k;
    std::string& l = labels[k];
    if (!l.empty()) l += ';';
    l += std::string(to_string(e.type)) + ':' + std::to_string(e.limb);
  }
  return labels;
}

}  // namespace

std::vector<std::size_t> trace_rows(const SimTrace& trace, int stride) {
  if (stride < 1) throw Error(Errc::validation_error, "trace_stride: must be at least 1");
  const std::vector<std::string> labels = event_labels(trace);
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < trace.size(); ++k)
    if (k % static_cast<std::size_t>(stride) == 0 || k + 1 == trace.size() || !labels[k].empty()) rows.push_back(k);
  return rows;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace, int stride) {
  const std::vector<std::string> labels = event_labels(trace);
  out << "t";
  for (int i = 0; i < trace.n_grippers; ++i) out << ",fx_" << i << ",fy_" << i << ",fz_" << i;
  out << ",max_force,max_pull,gia_margin,base_x,base_y,base_z,base_qw,base_qx,base_qy,base_qz,events\n";
  for (std::size_t k : trace_rows(trace, stride)) {
    put_number(out, trace.t[k]);
    for (const Vec3& f : trace.force[k])
      for (int j = 0; j < 3; ++j) {
        out << ',';
        put_number(out, f[j]);
      }
    const Pose& b = trace.base[k];
    for (double v : {trace.max_force[k], trace.max_pull[k], trace.gia[k], b.position.x(), b.position.y(),
                     b.position.z(), b.orientation.w(), b.orientation.x(), b.orientation.y(), b.orientation.z()}) {
      out << ',';
      put_number(out, v);
    }
    out << ',' << labels[k] << '\n';
  }
}

// ---------------------------------------------------------------------------

TerrainMap build_terrain(const Scenario& scenario) {
  switch (scenario.terrain_kind) {
    case TerrainKind::flat: {
      const TerrainParams& p = scenario.terrain;
      return flat_terrain(p.x_min, p.y_min, p.x_max, p.y_max, p.resolution);
    }
    case TerrainKind::file: {
      std::ifstream in(scenario.terrain_file);
      if (!in) throw Error(Errc::io_error, "cannot open terrain file '" + scenario.terrain_file + "'");
      return read_terrain_csv(in);
    }
    case TerrainKind::fractal: break;
  }
  return generate_fractal(scenario.terrain);
}

RobotState initial_state(const Scenario& scenario, const TerrainMap& map) {
  const RobotModel& model = scenario.robot;
  Pose probe;
  probe.position = Vec3(scenario.start.x(), scenario.start.y(), 0.0);

  std::vector<Vec3> feet;
  Mat3X contacts(3, model.n_limbs());
  for (int i = 0; i < model.n_limbs(); ++i) {
    const Vec3 p = foot_position(model, probe, i, model.limbs[i].home);
    const double y = model.planar ? 0.0 : p.y();
    feet.emplace_back(p.x(), y, map.elevation(p.x(), y));
    contacts.col(i) = feet.back();
  }

  // Both strategies start from the same collision-free stance.
  const Pose base = model.planar ? nominal_base_pose(contacts, scenario.gait)
                                 : desired_base_pose(regression_plane(contacts), scenario.gait, map,
                                                     Footprint::of(model));

  RobotState state = RobotState::at_rest(model, base, model.home());
  for (int i = 0; i < model.n_limbs(); ++i) {
    const IkResult r = solve_ik(model, base, i, feet[i], model.limbs[i].home);
    if (r.status != IkStatus::ok)
      throw Error(Errc::infeasible, "initial stance: limb " + std::to_string(i) + " cannot reach its foothold");
    state.q.segment(model.offset(i), model.limb_dof(i)) = r.q;
  }
  state.anchors = feet;
  return state;
}

ScenarioRun run_scenario(const Scenario& scenario) {
  scenario.validate();
  const TerrainMap map = build_terrain(scenario);
  ScenarioRun run;
  run.initial = initial_state(scenario, map);

  int cycles = scenario.cycles;
  if (scenario.sim.duration > 0.0)
    cycles = static_cast<int>(std::ceil(scenario.sim.duration / scenario.gait.period() - 1e-9));
  run.plan = build_gait_plan(scenario.robot, scenario.gait, run.initial, cycles, map, scenario.strategy);

  MotionConfig motion;
  motion.strategy = scenario.strategy;
  motion.lrst = scenario.lrst;
  motion.md = scenario.md;
  motion.dt = scenario.sim.step;
  run.timeline = assemble_motion(run.plan, scenario.robot, scenario.gait, motion, run.initial, &map);

  ContactModel contact = scenario.contact;
  contact.anchors.clear();
  contact.normals.clear();
  contact.attached.clear();
  for (int i = 0; i < scenario.robot.n_limbs(); ++i) {
    const Vec3& a = run.initial.anchors[i];
    contact.attach(i, a, map.surface_normal(a.x(), a.y()));
  }
  run.trace = simulate(scenario.robot, run.initial, run.timeline, contact, scenario.sim, &map);
  run.summary = summarize(run.trace, run.timeline, scenario.gait, scenario.lrst);
  return run;
}

}  // namespace climb
