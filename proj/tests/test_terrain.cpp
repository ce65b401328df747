#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "climb/error.hpp"
#include "climb/robot_model.hpp"
#include "climb/terrain.hpp"
#include "test_util.hpp"

namespace climb {
namespace {

TerrainParams small_params(std::uint64_t seed) {
  TerrainParams p;
  p.seed = seed;
  p.x_max = 1.0;
  p.y_max = 1.0;
  return p;
}

TEST(Terrain, ZeroSigmaIsFlat) {
  TerrainParams p = small_params(3);
  p.sigma = 0.0;
  const TerrainMap map = generate_fractal(p);
  EXPECT_EQ(map.heights().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(map.elevation(0.37, 0.61), 0.0);
}

TEST(Terrain, SameSeedSameGrid) {
  const TerrainMap a = generate_fractal(small_params(42));
  const TerrainMap b = generate_fractal(small_params(42));
  const TerrainMap c = generate_fractal(small_params(43));
  EXPECT_TRUE(a.heights() == b.heights());
  EXPECT_FALSE(a.heights() == c.heights());
}

TEST(Terrain, ElevationStdNearTarget) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double sd = generate_fractal(small_params(seed)).elevation_std();
    EXPECT_GE(sd, 0.0255);
    EXPECT_LE(sd, 0.0345);
  }
}

TEST(Terrain, GridShapeFollowsExtents) {
  const TerrainMap map = generate_fractal(small_params(1));
  EXPECT_EQ(map.nx(), 65);
  EXPECT_EQ(map.ny(), 65);
  EXPECT_DOUBLE_EQ(map.x_max(), 1.0);
  EXPECT_DOUBLE_EQ(map.y_max(), 1.0);
}

TEST(Terrain, NodeQueryReturnsNodeValue) {
  const TerrainMap map = generate_fractal(small_params(5));
  for (Eigen::Index ix = 0; ix < map.nx(); ix += 7)
    for (Eigen::Index iy = 0; iy < map.ny(); iy += 5) {
      const double x = map.x_min() + ix * map.resolution();
      const double y = map.y_min() + iy * map.resolution();
      EXPECT_NEAR(map.elevation(x, y), map.heights()(ix, iy), 1e-15);
    }
}

TEST(Terrain, BilinearStaysWithinCellNodes) {
  const TerrainMap map = generate_fractal(small_params(6));
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = test::uniform(rng, map.x_min(), map.x_max());
    const double y = test::uniform(rng, map.y_min(), map.y_max());
    const auto ix = std::min<Eigen::Index>(static_cast<Eigen::Index>((x - map.x_min()) / map.resolution()), map.nx() - 2);
    const auto iy = std::min<Eigen::Index>(static_cast<Eigen::Index>((y - map.y_min()) / map.resolution()), map.ny() - 2);
    const Eigen::Matrix2d cell = map.heights().block<2, 2>(ix, iy);
    const double z = map.elevation(x, y);
    EXPECT_GE(z, cell.minCoeff() - 1e-15);
    EXPECT_LE(z, cell.maxCoeff() + 1e-15);
  }
}

TEST(Terrain, OutsideQueryThrows) {
  const TerrainMap map = generate_fractal(small_params(1));
  EXPECT_FALSE(map.contains(1.2, 0.5));
  try {
    map.elevation(1.2, 0.5);
    FAIL() << "expected out_of_bounds";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::out_of_bounds);
  }
}

TEST(Terrain, FlatNormalPointsUp) {
  const TerrainMap map = flat_terrain(0.0, 0.0, 1.0, 1.0, 0.05);
  EXPECT_LE((map.surface_normal(0.33, 0.71) - Vec3::UnitZ()).norm(), 1e-15);
}

TEST(Terrain, TiltedPlaneNormal) {
  const double a = 0.3, b = -0.2, res = 0.05;
  MatX h(21, 21);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = a * (i * res) + b * (j * res);
  const TerrainMap map(0.0, 0.0, res, h);
  const Vec3 expected = Vec3(-a, -b, 1.0).normalized();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = test::uniform(rng, 0.0, 1.0), y = test::uniform(rng, 0.0, 1.0);
    EXPECT_LE((map.surface_normal(x, y) - expected).norm(), 1e-6);
    EXPECT_NEAR(map.elevation(x, y), a * x + b * y, 1e-12);
  }
}

TEST(Terrain, CsvRoundTrip) {
  const TerrainMap map = generate_fractal(small_params(9));
  std::stringstream buf;
  write_terrain_csv(buf, map);
  const TerrainMap back = read_terrain_csv(buf);
  EXPECT_TRUE(back.heights() == map.heights());
  EXPECT_EQ(back.seed(), map.seed());
  EXPECT_EQ(back.resolution(), map.resolution());
  EXPECT_EQ(back.x_min(), map.x_min());
}

Footprint quad_footprint() { return Footprint::of(make_reference_quadruped()); }

TEST(Collision, PlaneAboveFlatGroundIsClear) {
  const TerrainMap map = flat_terrain(0.0, 0.0, 1.0, 1.0, 0.05);
  const Footprint fp = quad_footprint();
  Pose base;
  base.position = Vec3(0.5, 0.5, 0.05 + fp.b_low);
  const CollisionDepth c = base_collision_depth(map, base, fp);
  EXPECT_EQ(c.max_penetration, 0.0);
  for (double d : c.depth) EXPECT_NEAR(d, 0.05, 1e-15);
}

TEST(Collision, PlaneBelowFlatGroundReportsDepth) {
  const TerrainMap map = flat_terrain(0.0, 0.0, 1.0, 1.0, 0.05);
  const Footprint fp = quad_footprint();
  Pose base;
  base.position = Vec3(0.5, 0.5, -0.02 + fp.b_low);
  EXPECT_NEAR(base_collision_depth(map, base, fp).max_penetration, 0.02, 1e-15);
}

TEST(Collision, MatchesExhaustiveSampling) {
  const TerrainMap map = generate_fractal(small_params(11));
  const Footprint fp = quad_footprint();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Pose base;
    base.position = Vec3(test::uniform(rng, 0.2, 0.8), test::uniform(rng, 0.2, 0.8), test::uniform(rng, -0.05, 0.1));
    base.orientation = exp_quat(test::random_vec(rng, 0.3));
    double worst = 0.0;
    const int n = 9;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec3 local(fp.length * (double(i) / (n - 1) - 0.5), fp.width * (double(j) / (n - 1) - 0.5), -fp.b_low);
        const Vec3 w = base.position + base.rotation() * local;
        worst = std::max(worst, map.elevation(w.x(), w.y()) - w.z());
      }
    EXPECT_NEAR(base_collision_depth(map, base, fp).max_penetration, worst, 1e-12);
  }
}

TEST(Collision, PenetrationMonotoneUnderRaise) {
  const TerrainMap map = generate_fractal(small_params(12));
  const Footprint fp = quad_footprint();
  Pose base;
  base.position = Vec3(0.5, 0.5, -0.06);
  base.orientation = exp_quat(Vec3(0.1, -0.05, 0.3));
  double previous = base_collision_depth(map, base, fp).max_penetration;
  EXPECT_GT(previous, 0.0);
  for (int k = 0; k < 40; ++k) {
    base.position.z() += 0.005;
    const double now = base_collision_depth(map, base, fp).max_penetration;
    EXPECT_LE(now, previous);
    previous = now;
  }
  EXPECT_EQ(previous, 0.0);
}

}  // namespace
}  // namespace climb
