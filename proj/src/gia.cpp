#include <algorithm>
#include <cmath>
#include <limits>

#include "climb/error.hpp"
#include "climb/momentum.hpp"
#include "climb/sim.hpp"

namespace climb {

namespace {

struct Edge {
  Vec2 point;     // a point on the tipping edge
  Vec2 outward;   // unit, in the plane
};

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Counter-clockwise convex hull (monotone chain).
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  return hull;
}

}  // namespace

GiaMargin gia_margin(const Vec3& com, double mass, const Vec3& gia, const Eigen::Ref<const Mat3X>& contacts,
                     double hold_force, bool planar) {
  const Eigen::Index m = contacts.cols();
  if (m < (planar ? 2 : 3))
    throw Error(Errc::degenerate, "GIA margin needs " + std::string(planar ? "2" : "3") + " contact points");

  const SupportPlane plane = planar ? support_line(contacts) : regression_plane(contacts);
  const Vec3& n = plane.normal;
  const Mat3 frame = plane.frame.toRotationMatrix();
  const Vec3 ex = planar ? Vec3(n.z(), 0.0, -n.x()) : Vec3(frame.col(0));
  const Vec3 ey = planar ? Vec3::UnitY() : Vec3(frame.col(1));

  auto in_plane = [&](const Vec3& p) { return Vec2((p - plane.centroid).dot(ex), (p - plane.centroid).dot(ey)); };
  std::vector<Vec2> pts;
  for (Eigen::Index j = 0; j < m; ++j) pts.push_back(in_plane(contacts.col(j)));

  std::vector<Edge> edges;
  if (planar) {
    double lo = pts[0].x(), hi = pts[0].x();
    for (const Vec2& p : pts) {
      lo = std::min(lo, p.x());
      hi = std::max(hi, p.x());
    }
    edges.push_back({Vec2(hi, 0.0), Vec2::UnitX()});
    edges.push_back({Vec2(lo, 0.0), -Vec2::UnitX()});
  } else {
    const std::vector<Vec2> hull = convex_hull(pts);
    if (hull.size() < 3) throw Error(Errc::degenerate, "support polygon is degenerate");
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
      edges.push_back({hull[i], Vec2(e.y(), -e.x()).normalized()});
    }
  }

  const double h = (com - plane.centroid).dot(n);
  const Vec2 c = in_plane(com);
  const double a_n = -gia.dot(n);
  const Vec2 a_t(gia.dot(ex), gia.dot(ey));
  const double denom = mass * std::max(a_n, 0.0) + static_cast<double>(m) * hold_force;

  GiaMargin out;
  out.margin = std::numeric_limits<double>::infinity();
  if (!(denom > 1e-300)) {
    out.no_intersection = true;
    for (const Edge& e : edges) out.margin = std::min(out.margin, -(c - e.point).dot(e.outward));
    return out;
  }
  for (const Edge& e : edges) {
    const double d = (c - e.point).dot(e.outward);
    double hold = 0.0;
    for (const Vec2& p : pts) hold += hold_force * std::max(0.0, -(p - e.point).dot(e.outward));
    const double tip = mass * (a_n * d + h * a_t.dot(e.outward));
    out.margin = std::min(out.margin, (hold - tip) / denom);
  }
  return out;
}

GiaMargin gia_margin(const RobotModel& model, const RobotState& state, const Eigen::Ref<const Mat3X>& contacts,
                     const Vec3& com_accel, const Vec3& gravity, double hold_force) {
  return gia_margin(center_of_mass(model, state), model.total_mass(), gravity - com_accel, contacts, hold_force,
                    model.planar);
}

}  // namespace climb
