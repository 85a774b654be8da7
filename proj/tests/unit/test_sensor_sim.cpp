#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tunnelscout/sensor_sim.hpp"

using namespace tunnelscout;

TEST(RayBox, AnalyticPlaneIntersection) {
  const Box wall{Vec3(5.0, -10.0, -10.0), Vec3(6.0, 10.0, 10.0)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 dir = Vec3(1.0, ang(rng), ang(rng)).normalized();
    const auto t = ray_box(Vec3::Zero(), dir, wall);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, 5.0 / dir.x(), 1e-9);
  }
  EXPECT_FALSE(ray_box(Vec3::Zero(), -Vec3::UnitX(), wall).has_value());
  EXPECT_FALSE(ray_box(Vec3::Zero(), Vec3::UnitY(), wall).has_value());
}

TEST(RayBox, StartingInsideIsIgnored) {
  const Box b{Vec3(-1.0, -1.0, -1.0), Vec3(1.0, 1.0, 1.0)};
  EXPECT_FALSE(ray_box(Vec3::Zero(), Vec3::UnitX(), b).has_value());
}

TEST(RayCylinder, SideAndTop) {
  const Cylinder c{Vec3(3.0, 0.0, 0.0), 0.5, 2.0};
  auto side = ray_cylinder(Vec3(0.0, 0.0, 1.0), Vec3::UnitX(), c);
  ASSERT_TRUE(side.has_value());
  EXPECT_NEAR(*side, 2.5, 1e-9);
  auto top = ray_cylinder(Vec3(3.0, 0.0, 5.0), -Vec3::UnitZ(), c);
  ASSERT_TRUE(top.has_value());
  EXPECT_NEAR(*top, 3.0, 1e-9);
  EXPECT_FALSE(ray_cylinder(Vec3(0.0, 0.0, 2.5), Vec3::UnitX(), c).has_value());
  EXPECT_FALSE(ray_cylinder(Vec3(0.0, 0.6, 1.0), Vec3::UnitX(), c).has_value());
  // Oblique hit on the side: solve |o + t d - base|_xy = r by hand.
  const Vec3 d = Vec3(1.0, 0.1, 0.0).normalized();
  const auto t = ray_cylinder(Vec3(0.0, 0.0, 1.0), d, c);
  ASSERT_TRUE(t.has_value());
  const Vec3 p = Vec3(0.0, 0.0, 1.0) + *t * d;
  EXPECT_NEAR((p.head<2>() - c.base.head<2>()).norm(), 0.5, 1e-9);
}

TEST(Raycast, NearestWithinRange) {
  Scene s;
  s.boxes.push_back({Vec3(2.0, -1.0, -1.0), Vec3(2.5, 1.0, 1.0)});
  s.cylinders.push_back({Vec3(1.5, 0.0, -1.0), 0.2, 3.0});
  const auto t = raycast(s, Vec3::Zero(), Vec3::UnitX(), 3.0);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 1.3, 1e-9);
  EXPECT_FALSE(raycast(s, Vec3::Zero(), Vec3::UnitX(), 1.0).has_value());
}

TEST(DepthCamera, RayGridSpansFieldOfView) {
  const DepthCamera cam;
  const auto dirs = cam.ray_directions();
  ASSERT_EQ(dirs.size(), static_cast<std::size_t>(cam.rays_h * cam.rays_v));
  double max_az = 0.0, max_el = 0.0;
  for (const Vec3& d : dirs) {
    EXPECT_NEAR(d.norm(), 1.0, 1e-12);
    EXPECT_GT(d.x(), 0.0);
    max_az = std::max(max_az, std::abs(std::atan2(d.y(), d.x())));
    max_el = std::max(max_el, std::abs(std::atan2(d.z(), d.x())));
  }
  EXPECT_NEAR(max_az, 35.0 * std::numbers::pi / 180.0, 1e-9);
  EXPECT_NEAR(max_el, 27.5 * std::numbers::pi / 180.0, 1e-9);
}

TEST(DepthCamera, ValidateRejectsNonsense) {
  DepthCamera cam;
  cam.max_range = 0.0;
  EXPECT_THROW(cam.validate(), InvalidSpec);
  cam = DepthCamera{};
  cam.rays_h = 1;
  EXPECT_THROW(cam.validate(), InvalidSpec);
}

TEST(RenderDepthScan, WallAheadMatchesPlaneDistance) {
  Scene s;
  s.boxes.push_back({Vec3(2.0, -10.0, -10.0), Vec3(3.0, 10.0, 10.0)});
  DepthCamera cam;
  cam.rays_h = 11;
  cam.rays_v = 9;
  const DepthScan scan = render_depth_scan(s, cam, Pose(Vec3::Zero(), 0.0));
  ASSERT_EQ(scan.rays.size(), 99u);
  for (const DepthRay& r : scan.rays) {
    ASSERT_TRUE(r.hit_distance.has_value());
    EXPECT_NEAR(*r.hit_distance * r.direction.x(), 2.0, 1e-9);
  }
}

TEST(RenderDepthScan, RotatesWithYaw) {
  Scene s;
  s.boxes.push_back({Vec3(-10.0, 2.0, -10.0), Vec3(10.0, 3.0, 10.0)});
  DepthCamera cam;
  cam.rays_h = 5;
  cam.rays_v = 5;
  const DepthScan ahead = render_depth_scan(s, cam, Pose(Vec3::Zero(), 0.0));
  for (const DepthRay& r : ahead.rays) EXPECT_FALSE(r.hit_distance.has_value());
  const DepthScan left = render_depth_scan(s, cam, Pose(Vec3::Zero(), std::numbers::pi / 2));
  for (const DepthRay& r : left.rays) {
    ASSERT_TRUE(r.hit_distance.has_value());
    EXPECT_NEAR(r.direction.norm(), 1.0, 1e-12);
    EXPECT_NEAR(*r.hit_distance * r.direction.y(), 2.0, 1e-9);
  }
}

TEST(RenderDepthScan, NoiseIsSeededAndBounded) {
  Scene s;
  s.boxes.push_back({Vec3(2.0, -10.0, -10.0), Vec3(3.0, 10.0, 10.0)});
  DepthCamera cam;
  cam.noise_sigma = 0.01;
  std::mt19937_64 a(7), b(7);
  const DepthScan sa = render_depth_scan(s, cam, Pose(Vec3::Zero(), 0.0), &a);
  const DepthScan sb = render_depth_scan(s, cam, Pose(Vec3::Zero(), 0.0), &b);
  const DepthScan clean = render_depth_scan(s, cam, Pose(Vec3::Zero(), 0.0));
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < sa.rays.size(); ++i) {
    ASSERT_EQ(sa.rays[i].hit_distance, sb.rays[i].hit_distance);
    const double e = *sa.rays[i].hit_distance - *clean.rays[i].hit_distance;
    sum_sq += e * e;
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(sa.rays.size()));
  EXPECT_NEAR(rms, 0.01, 0.001);
}

TEST(Scene, ValidateRejectsInvertedBox) {
  Scene s;
  s.boxes.push_back({Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 1.0)});
  EXPECT_THROW(s.validate(), InvalidSpec);
}
