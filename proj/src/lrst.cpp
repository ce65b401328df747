#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "climb/error.hpp"
#include "climb/kinematics.hpp"
#include "climb/momentum.hpp"
#include "climb/motion.hpp"
#include "climb/nelder_mead.hpp"

namespace climb {

void LrstConfig::validate() const {
  if (c_lin < 0.0 || c_ang < 0.0 || c_height < 0.0)
    throw Error(Errc::validation_error, "lrst weights: must be non-negative");
  if (!(step_height > 0.0)) throw Error(Errc::validation_error, "step_height: must be positive");
  if (samples < 16) throw Error(Errc::validation_error, "samples: must be at least 16");
  if (restarts < 1) throw Error(Errc::validation_error, "restarts: must be at least 1");
  if (max_iterations < 1) throw Error(Errc::validation_error, "max_iterations: must be at least 1");
}

SwingProblem SwingProblem::from_state(const RobotModel& model, const RobotState& state, int limb,
                                      const Vec3& start, const Vec3& goal, const Vec3& up, double t0,
                                      double tf) {
  SwingProblem p;
  p.model = &model;
  p.base = state.base;
  p.limb = limb;
  p.seed = state.limb_q(model, limb);
  p.reference = center_of_mass(model, state);
  p.start = start;
  p.goal = goal;
  p.up = up.normalized();
  p.t0 = t0;
  p.tf = tf;
  return p;
}

Vec3 BaselineSwing::position(double t) const {
  const double s = tf_ > t0_ ? std::clamp((t - t0_) / (tf_ - t0_), 0.0, 1.0) : 1.0;
  const double lift = s < 0.5 ? quintic(2.0 * s) : quintic(2.0 - 2.0 * s);
  return start_ + quintic(s) * (goal_ - start_) + height_ * lift * up_;
}

Vec3 BaselineSwing::velocity(double t) const {
  if (!(tf_ > t0_)) return Vec3::Zero();
  const double s = std::clamp((t - t0_) / (tf_ - t0_), 0.0, 1.0);
  const double dlift = s < 0.5 ? 2.0 * quintic_d1(2.0 * s) : -2.0 * quintic_d1(2.0 - 2.0 * s);
  return (quintic_d1(s) * (goal_ - start_) + height_ * dlift * up_) / (tf_ - t0_);
}

Vec3 path_position(const SwingPath& path, double t) {
  return std::visit([t](const auto& p) -> Vec3 { return p.position(t); }, path);
}

Vec3 path_velocity(const SwingPath& path, double t) {
  return std::visit([t](const auto& p) -> Vec3 { return p.velocity(t); }, path);
}

double swing_height(const Vec3& p, const Vec3& start, const Vec3& goal, const Vec3& up) {
  const Vec3 n = up.normalized();
  const Vec3 d = goal - start;
  const Vec3 d_perp = d - d.dot(n) * n;
  double s = 0.0;
  if (d_perp.squaredNorm() > 1e-24) s = std::clamp((p - start).dot(d_perp) / d_perp.squaredNorm(), 0.0, 1.0);
  return (p - start - s * d).dot(n);
}

namespace {

// Derivative of uniformly spaced samples (columns): central differences
// inside, second-order one-sided differences at both ends.
template <typename Derived>
typename Derived::PlainObject differentiate(const Eigen::MatrixBase<Derived>& f, double h) {
  const Eigen::Index n = f.cols();
  typename Derived::PlainObject d(f.rows(), n);
  d.col(0) = (-3.0 * f.col(0) + 4.0 * f.col(1) - f.col(2)) / (2.0 * h);
  for (Eigen::Index i = 1; i + 1 < n; ++i) d.col(i) = (f.col(i + 1) - f.col(i - 1)) / (2.0 * h);
  d.col(n - 1) = (3.0 * f.col(n - 1) - 4.0 * f.col(n - 2) + f.col(n - 3)) / (2.0 * h);
  return d;
}

LrstTerms infeasible_terms() {
  LrstTerms t;
  t.cost = std::numeric_limits<double>::infinity();
  return t;
}

}  // namespace

LrstTerms lrst_terms(const SwingProblem& problem, const SwingPath& path, const LrstConfig& config) {
  const RobotModel& model = *problem.model;
  const int n = config.samples;
  const int k = model.limb_dof(problem.limb);
  const double h = (problem.tf - problem.t0) / (n - 1);

  MatX q(k, n);
  VecX seed = problem.seed;
  LrstTerms terms;
  terms.apex = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec3 p = path_position(path, problem.t0 + i * h);
    if (!p.allFinite()) return infeasible_terms();
    const IkResult r = solve_ik(model, problem.base, problem.limb, p, seed);
    if (r.status != IkStatus::ok) return infeasible_terms();
    q.col(i) = r.q;
    seed = r.q;
    terms.apex = std::max(terms.apex, swing_height(p, problem.start, problem.goal, problem.up));
  }

  const MatX qd = differentiate(q, h);
  Eigen::Matrix<double, 6, Eigen::Dynamic> mom(6, n);
  for (int i = 0; i < n; ++i)
    mom.col(i) = coupling_inertia(model, problem.base, problem.limb, q.col(i), problem.reference) * qd.col(i);
  const auto rate = differentiate(mom, h);

  terms.feasible = true;
  terms.max_lin_rate = rate.topRows<3>().cwiseAbs().maxCoeff();
  terms.max_ang_rate = rate.bottomRows<3>().cwiseAbs().maxCoeff();
  terms.peak_rate = rate.colwise().norm().maxCoeff();
  terms.cost = config.c_lin * terms.max_lin_rate + config.c_ang * terms.max_ang_rate +
               config.c_height * std::abs(config.step_height - terms.apex);
  return terms;
}

double lrst_objective(const SwingProblem& problem, const Vec3& a3, const Vec3& a4, const LrstConfig& config) {
  const SwingPath path = make_swing_curve<double>(problem.start, problem.goal, a3, a4, problem.t0, problem.tf);
  const LrstTerms t = lrst_terms(problem, path, config);
  if (!t.feasible) throw Error(Errc::infeasible, "swing candidate violates joint limits or leaves the workspace");
  return t.cost;
}

std::pair<Vec3, Vec3> seed_control_points(const SwingProblem& problem, double step_height) {
  // b_3(1/2) + b_4(1/2) = 70/128, so this lift puts the midpoint at step_height.
  const Vec3 lift = step_height * 128.0 / 70.0 * problem.up.normalized();
  const Vec3 d = problem.goal - problem.start;
  return {problem.start + 3.0 / 7.0 * d + lift, problem.start + 4.0 / 7.0 * d + lift};
}

BaselineSwing baseline_swing(const SwingProblem& problem, double step_height) {
  return BaselineSwing(problem.start, problem.goal, problem.up, step_height, problem.t0, problem.tf);
}

namespace {

using Point6 = Eigen::Matrix<double, 6, 1>;

// Planar robots keep both control points in the x-z plane of the seed.
Point6 in_plane(const SwingProblem& problem, Point6 x) {
  if (problem.model->planar) {
    x[1] = problem.start.y();
    x[4] = problem.start.y();
  }
  return x;
}

NelderMeadResult<double, 6> run_restart(const SwingProblem& problem, const LrstConfig& config, int index) {
  const auto [a3, a4] = seed_control_points(problem, config.step_height);
  Point6 x0;
  x0 << a3, a4;
  if (index > 0) {
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(index));
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int i = 0; i < 6; ++i) x0[i] += noise(rng);
  }
  auto cost = [&](const Point6& raw) {
    const Point6 x = in_plane(problem, raw);
    const SwingPath path =
        make_swing_curve<double>(problem.start, problem.goal, x.head<3>(), x.tail<3>(), problem.t0, problem.tf);
    return lrst_terms(problem, path, config).cost;
  };
  NelderMeadOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.tolerance = config.tolerance;
  opt.step = config.initial_step;
  NelderMeadResult<double, 6> res = nelder_mead<double, 6>(cost, in_plane(problem, x0), opt);
  res.x = in_plane(problem, res.x);
  return res;
}

}  // namespace

SwingSolution optimize_swing(const SwingProblem& problem, const LrstConfig& config) {
  config.validate();
  if (!(problem.tf > problem.t0)) throw Error(Errc::validation_error, "swing time span must be positive");

  std::vector<std::future<NelderMeadResult<double, 6>>> jobs;
  for (int r = 0; r < config.restarts; ++r)
    jobs.push_back(std::async(std::launch::async, run_restart, std::cref(problem), std::cref(config), r));

  SwingSolution sol;
  int best = -1;
  NelderMeadResult<double, 6> winner;
  for (int r = 0; r < config.restarts; ++r) {
    NelderMeadResult<double, 6> res = jobs[r].get();
    if (!std::isfinite(res.cost)) continue;
    ++sol.feasible_restarts;
    if (best < 0 || res.cost < winner.cost) {
      best = r;
      winner = std::move(res);
    }
  }
  if (best < 0) throw Error(Errc::no_feasible_trajectory, "all swing restarts infeasible for limb " +
                                                              std::to_string(problem.limb));

  sol.trajectory = make_swing_curve<double>(problem.start, problem.goal, winner.x.head<3>(),
                                            winner.x.tail<3>(), problem.t0, problem.tf);
  sol.terms = lrst_terms(problem, sol.trajectory, config);
  sol.baseline = lrst_terms(problem, baseline_swing(problem, config.step_height), config);
  sol.history = std::move(winner.history);
  return sol;
}

}  // namespace climb
