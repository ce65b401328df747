#include "climb/terrain.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "climb/csv.hpp"
#include "climb/error.hpp"

namespace climb {

TerrainMap::TerrainMap(double x_min, double y_min, double resolution, MatX heights,
                       std::uint64_t seed, double sigma)
    : x_min_(x_min), y_min_(y_min), resolution_(resolution), heights_(std::move(heights)),
      seed_(seed), sigma_(sigma) {
  if (!(resolution_ > 0.0)) throw Error(Errc::bad_config, "terrain resolution must be positive");
  if (heights_.rows() < 2 || heights_.cols() < 2)
    throw Error(Errc::bad_config, "terrain grid must be at least 2x2");
}

bool TerrainMap::contains(double x, double y) const {
  const double eps = 1e-12;
  return x >= x_min() - eps && x <= x_max() + eps && y >= y_min() - eps && y <= y_max() + eps;
}

TerrainMap::Cell TerrainMap::locate(double x, double y) const {
  if (!contains(x, y)) {
    std::ostringstream msg;
    msg << "query (" << x << ", " << y << ") outside terrain [" << x_min() << ", " << x_max() << "] x ["
        << y_min() << ", " << y_max() << "]";
    throw Error(Errc::out_of_bounds, msg.str());
  }
  const double gx = (x - x_min_) / resolution_;
  const double gy = (y - y_min_) / resolution_;
  Cell c;
  c.ix = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(gx)), 0, nx() - 2);
  c.iy = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(gy)), 0, ny() - 2);
  c.fx = std::clamp(gx - static_cast<double>(c.ix), 0.0, 1.0);
  c.fy = std::clamp(gy - static_cast<double>(c.iy), 0.0, 1.0);
  return c;
}

double TerrainMap::elevation(double x, double y) const {
  const Cell c = locate(x, y);
  const double z00 = heights_(c.ix, c.iy), z10 = heights_(c.ix + 1, c.iy);
  const double z01 = heights_(c.ix, c.iy + 1), z11 = heights_(c.ix + 1, c.iy + 1);
  return (1 - c.fx) * (1 - c.fy) * z00 + c.fx * (1 - c.fy) * z10 + (1 - c.fx) * c.fy * z01 +
         c.fx * c.fy * z11;
}

Vec3 TerrainMap::surface_normal(double x, double y) const {
  const Cell c = locate(x, y);
  const double z00 = heights_(c.ix, c.iy), z10 = heights_(c.ix + 1, c.iy);
  const double z01 = heights_(c.ix, c.iy + 1), z11 = heights_(c.ix + 1, c.iy + 1);
  const double dzdx = ((1 - c.fy) * (z10 - z00) + c.fy * (z11 - z01)) / resolution_;
  const double dzdy = ((1 - c.fx) * (z01 - z00) + c.fx * (z11 - z10)) / resolution_;
  return Vec3(-dzdx, -dzdy, 1.0).normalized();
}

double TerrainMap::elevation_std() const {
  const double mean = heights_.mean();
  return std::sqrt((heights_.array() - mean).square().mean());
}

TerrainMap generate_fractal(const TerrainParams& p) {
  if (!(p.resolution > 0.0)) throw Error(Errc::bad_config, "terrain resolution must be positive");
  if (!(p.x_max > p.x_min) || !(p.y_max > p.y_min))
    throw Error(Errc::bad_config, "terrain extents must be non-empty");
  if (!(p.sigma >= 0.0)) throw Error(Errc::bad_config, "terrain sigma must be non-negative");
  if (!(p.roughness > 0.0 && p.roughness <= 1.0))
    throw Error(Errc::bad_config, "terrain roughness must be in (0, 1]");

  const auto nx = static_cast<Eigen::Index>(std::floor((p.x_max - p.x_min) / p.resolution + 1e-9)) + 1;
  const auto ny = static_cast<Eigen::Index>(std::floor((p.y_max - p.y_min) / p.resolution + 1e-9)) + 1;
  if (nx < 2 || ny < 2) throw Error(Errc::bad_config, "terrain grid must be at least 2x2");

  if (p.sigma == 0.0) return TerrainMap(p.x_min, p.y_min, p.resolution, MatX::Zero(nx, ny), p.seed, 0.0);

  // Diamond-square on the smallest (2^n + 1)^2 grid covering the map.
  Eigen::Index size = 1;
  while (size + 1 < std::max(nx, ny)) size *= 2;
  const Eigen::Index n = size + 1;
  MatX z = MatX::Zero(n, n);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  z(0, 0) = gauss(rng);
  z(size, 0) = gauss(rng);
  z(0, size) = gauss(rng);
  z(size, size) = gauss(rng);

  double scale = 1.0;
  const double decay = std::pow(2.0, -p.roughness);
  for (Eigen::Index step = size; step > 1; step /= 2) {
    const Eigen::Index half = step / 2;
    for (Eigen::Index i = half; i < n; i += step)
      for (Eigen::Index j = half; j < n; j += step)
        z(i, j) = 0.25 * (z(i - half, j - half) + z(i + half, j - half) + z(i - half, j + half) +
                          z(i + half, j + half)) +
                  scale * gauss(rng);
    for (Eigen::Index i = 0; i < n; i += half) {
      for (Eigen::Index j = (i / half) % 2 == 0 ? half : 0; j < n; j += step) {
        double sum = 0.0;
        int count = 0;
        if (i >= half) { sum += z(i - half, j); ++count; }
        if (i + half < n) { sum += z(i + half, j); ++count; }
        if (j >= half) { sum += z(i, j - half); ++count; }
        if (j + half < n) { sum += z(i, j + half); ++count; }
        z(i, j) = sum / count + scale * gauss(rng);
      }
    }
    scale *= decay;
  }

  MatX heights = z.topLeftCorner(nx, ny);
  heights.array() -= heights.mean();
  const double sd = std::sqrt(heights.array().square().mean());
  if (sd > 0.0) heights *= p.sigma / sd;
  return TerrainMap(p.x_min, p.y_min, p.resolution, std::move(heights), p.seed, p.sigma);
}

TerrainMap flat_terrain(double x_min, double y_min, double x_max, double y_max, double resolution) {
  TerrainParams p;
  p.x_min = x_min;
  p.y_min = y_min;
  p.x_max = x_max;
  p.y_max = y_max;
  p.resolution = resolution;
  p.sigma = 0.0;
  p.seed = 0;
  return generate_fractal(p);
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t row) {
  std::vector<double> vals;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == ',')) ++p;
    if (p >= end || *p == '\r') break;
    double v = 0;
    auto r = std::from_chars(p, end, v);
    if (r.ec != std::errc())
      throw Error(Errc::parse_error, "terrain csv row " + std::to_string(row) + ": bad number");
    vals.push_back(v);
    p = r.ptr;
  }
  return vals;
}

}  // namespace

void write_terrain_csv(std::ostream& out, const TerrainMap& map) {
  out << "resolution,x_min,y_min,x_max,y_max,seed,sigma\n";
  put_number(out, map.resolution());
  for (double v : {map.x_min(), map.y_min(), map.x_max(), map.y_max()}) {
    out << ',';
    put_number(out, v);
  }
  out << ',' << map.seed() << ',';
  put_number(out, map.sigma());
  out << '\n';
  for (Eigen::Index iy = 0; iy < map.ny(); ++iy) {
    for (Eigen::Index ix = 0; ix < map.nx(); ++ix) {
      if (ix) out << ',';
      put_number(out, map.heights()(ix, iy));
    }
    out << '\n';
  }
}

TerrainMap read_terrain_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("resolution", 0) != 0)
    throw Error(Errc::parse_error, "terrain csv: missing header");
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "terrain csv: missing metadata row");
  std::istringstream meta(line);
  double res, x0, y0, x1, y1, sigma;
  std::uint64_t seed;
  char c;
  if (!(meta >> res >> c >> x0 >> c >> y0 >> c >> x1 >> c >> y1 >> c >> seed >> c >> sigma))
    throw Error(Errc::parse_error, "terrain csv: bad metadata row");
  const auto nx = static_cast<Eigen::Index>(std::llround((x1 - x0) / res)) + 1;
  const auto ny = static_cast<Eigen::Index>(std::llround((y1 - y0) / res)) + 1;
  MatX h(nx, ny);
  for (Eigen::Index iy = 0; iy < ny; ++iy) {
    if (!std::getline(in, line)) throw Error(Errc::parse_error, "terrain csv: truncated grid");
    const auto row = parse_row(line, static_cast<std::size_t>(iy) + 3);
    if (static_cast<Eigen::Index>(row.size()) != nx)
      throw Error(Errc::parse_error, "terrain csv row " + std::to_string(iy + 3) + ": wrong column count");
    for (Eigen::Index ix = 0; ix < nx; ++ix) h(ix, iy) = row[ix];
  }
  return TerrainMap(x0, y0, res, std::move(h), seed, sigma);
}

Footprint Footprint::of(const RobotModel& model) {
  Footprint f;
  f.length = model.base.length;
  f.width = model.base.width;
  f.b_low = model.base.b_low;
  return f;
}

std::vector<Vec3> Footprint::points() const {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(samples_x * samples_y));
  for (int i = 0; i < samples_x; ++i)
    for (int j = 0; j < samples_y; ++j)
      pts.emplace_back(length * (static_cast<double>(i) / (samples_x - 1) - 0.5),
                       width * (static_cast<double>(j) / (samples_y - 1) - 0.5), -b_low);
  return pts;
}

CollisionDepth base_collision_depth(const TerrainMap& map, const Pose& base, const Footprint& footprint) {
  CollisionDepth out;
  for (const Vec3& local : footprint.points()) {
    const Vec3 p = base.transform(local);
    const double d = p.z() - map.elevation(p.x(), p.y());
    out.depth.push_back(d);
    if (d < 0.0) out.max_penetration = std::max(out.max_penetration, -d);
  }
  return out;
}

}  // namespace climb
