#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "climb/robot_model.hpp"
#include "climb/types.hpp"

namespace climb {

struct TerrainParams {
  std::uint64_t seed = 42;
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 2.0;
  double y_max = 2.0;
  double resolution = 0.015625;
  double sigma = 0.03;       // target elevation standard deviation (m)
  double roughness = 0.8;    // Hurst exponent of the diamond-square displacement
};

/// Regular elevation grid, bilinearly interpolated. Immutable after construction.
class TerrainMap {
 public:
  TerrainMap(double x_min, double y_min, double resolution, MatX heights,
             std::uint64_t seed = 0, double sigma = 0.0);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_min_ + resolution_ * (heights_.rows() - 1); }
  double y_max() const { return y_min_ + resolution_ * (heights_.cols() - 1); }
  double resolution() const { return resolution_; }
  std::uint64_t seed() const { return seed_; }
  double sigma() const { return sigma_; }
  Eigen::Index nx() const { return heights_.rows(); }
  Eigen::Index ny() const { return heights_.cols(); }
  /// heights()(ix, iy) is the elevation at (x_min + ix*res, y_min + iy*res).
  const MatX& heights() const { return heights_; }

  bool contains(double x, double y) const;

  /// Throws Errc::out_of_bounds outside the extents.
  double elevation(double x, double y) const;
  Vec3 surface_normal(double x, double y) const;

  /// Population standard deviation of the node elevations.
  double elevation_std() const;

 private:
  struct Cell {
    Eigen::Index ix, iy;
    double fx, fy;
  };
  Cell locate(double x, double y) const;

  double x_min_, y_min_, resolution_;
  MatX heights_;
  std::uint64_t seed_;
  double sigma_;
};

/// Seeded diamond-square surface rescaled to zero mean and std `sigma`.
TerrainMap generate_fractal(const TerrainParams& params);

/// Flat z = 0 map (used by planar scenarios).
TerrainMap flat_terrain(double x_min, double y_min, double x_max, double y_max, double resolution);

/// CSV: header row `resolution,x_min,y_min,x_max,y_max,seed,sigma`, one value
/// row, then one row of elevations per grid line of constant y.
void write_terrain_csv(std::ostream& out, const TerrainMap& map);
TerrainMap read_terrain_csv(std::istream& in);

/// Sample grid on the inferior base plane, in base coordinates.
struct Footprint {
  double length = 0.1;
  double width = 0.1;
  double b_low = 0.0;
  int samples_x = 9;
  int samples_y = 9;

  static Footprint of(const RobotModel& model);
  std::vector<Vec3> points() const;
};

struct CollisionDepth {
  std::vector<double> depth;      // inferior-plane z minus terrain z, per sample
  double max_penetration = 0.0;   // max |depth| over samples with depth < 0
};

CollisionDepth base_collision_depth(const TerrainMap& map, const Pose& base, const Footprint& footprint);

}  // namespace climb
