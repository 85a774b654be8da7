#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tunnelscout/zigzag_planner.hpp"

using namespace tunnelscout;

namespace {

FacePatch face_4x3() {
  FacePatch f;
  f.center = Vec3(20.0, 0.0, 1.5);
  f.width = 4.0;
  f.height = 3.0;
  f.normal = -Vec3::UnitX();
  return f;
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

// Fraction of the margin-shrunk face covered by the union of frustum
// footprints swept along each lane. 5 cm point grid.
double covered_fraction(const FacePatch& face, const Path& path, const DepthCamera& cam,
                        const ZigzagConfig& cfg) {
  const FaceBasis b = face_basis(face);
  const double hw = cfg.standoff * std::tan(deg(cam.h_fov_deg) / 2.0);
  const double hh = cfg.standoff * std::tan(deg(cam.v_fov_deg) / 2.0);
  const double uw = face.width - 2.0 * cfg.margin;
  const double uh = face.height - 2.0 * cfg.margin;
  int total = 0;
  int hit = 0;
  for (double su = -uw / 2; su <= uw / 2 + 1e-9; su += 0.05) {
    for (double sv = -uh / 2; sv <= uh / 2 + 1e-9; sv += 0.05) {
      ++total;
      bool seen = false;
      for (std::size_t i = 0; i + 1 < path.size() && !seen; ++i) {
        const Vec3 a = path.waypoints[i] - face.center;
        const Vec3 c = path.waypoints[i + 1] - face.center;
        // Only sweeping legs (same height) count.
        if (std::abs(a.dot(b.v) - c.dot(b.v)) > 1e-9) continue;
        const double lo = std::min(a.dot(b.u), c.dot(b.u)) - hw;
        const double hi = std::max(a.dot(b.u), c.dot(b.u)) + hw;
        seen = su >= lo && su <= hi && std::abs(sv - a.dot(b.v)) <= hh;
      }
      hit += seen ? 1 : 0;
    }
  }
  return static_cast<double>(hit) / total;
}

}  // namespace

TEST(ZigzagPlanner, LaneSpacingWorkedExample) {
  DepthCamera cam;
  ZigzagConfig cfg;
  cfg.standoff = 1.5;
  cfg.overlap_fraction = 0.2;
  cfg.margin = 0.3;
  const double expected = 0.8 * 2.0 * 1.5 * std::tan(deg(27.5));
  EXPECT_NEAR(lane_spacing(cam, cfg), expected, 1e-12);
  EXPECT_NEAR(lane_spacing(cam, cfg), 1.249, 1e-3);
  EXPECT_EQ(lane_count(face_4x3(), cam, cfg), 2);
  const Path p = plan_zigzag(face_4x3(), cam, cfg);
  EXPECT_EQ(p.size(), 4u);
}

TEST(ZigzagPlanner, SmallFaceGivesSingleLane) {
  DepthCamera cam;
  ZigzagConfig cfg;
  FacePatch f = face_4x3();
  f.width = 1.0;
  f.height = 1.0;
  const Path p = plan_zigzag(f, cam, cfg);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p.waypoints[0].z(), f.center.z(), 1e-12);
}

TEST(ZigzagPlanner, FaceInsideMarginIsInfeasible) {
  DepthCamera cam;
  ZigzagConfig cfg;
  FacePatch f = face_4x3();
  f.height = 0.6;
  EXPECT_THROW(plan_zigzag(f, cam, cfg), InfeasibleFace);
  f.height = 3.0;
  f.width = 0.5;
  EXPECT_THROW(plan_zigzag(f, cam, cfg), InfeasibleFace);
}

TEST(ZigzagPlanner, ConfigValidation) {
  ZigzagConfig cfg;
  cfg.standoff = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.standoff = 3.5;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.standoff = 1.5;
  cfg.overlap_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.overlap_fraction = -0.1;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.overlap_fraction = 0.0;
  cfg.margin = -0.1;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
}

TEST(ZigzagPlanner, StandoffBeyondCameraRangeRejected) {
  DepthCamera cam;
  cam.max_range = 1.0;
  ZigzagConfig cfg;
  EXPECT_THROW(plan_zigzag(face_4x3(), cam, cfg), InvalidSpec);
}

TEST(ZigzagPlanner, LanesAlternateAndStartOnTop) {
  DepthCamera cam;
  ZigzagConfig cfg;
  cfg.standoff = 0.8;
  FacePatch f = face_4x3();
  const Path p = plan_zigzag(f, cam, cfg);
  const FaceBasis b = face_basis(f);
  ASSERT_GE(p.size(), 6u);
  ASSERT_EQ(p.size() % 2, 0u);
  double prev_dir = 0.0;
  double prev_h = 1e9;
  for (std::size_t i = 0; i < p.size(); i += 2) {
    const double h = (p.waypoints[i] - f.center).dot(b.v);
    EXPECT_NEAR(h, (p.waypoints[i + 1] - f.center).dot(b.v), 1e-12);
    EXPECT_LT(h, prev_h);
    prev_h = h;
    const double dir = (p.waypoints[i + 1] - p.waypoints[i]).dot(b.u);
    EXPECT_NE(dir, 0.0);
    if (prev_dir != 0.0) EXPECT_LT(dir * prev_dir, 0.0);
    prev_dir = dir;
  }
}

TEST(ZigzagPlanner, WaypointsOnStandoffPlaneInsideRectangleFacingFace) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> size(1.0, 6.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> so(0.5, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    FacePatch f;
    f.center = Vec3(5.0, -2.0, 1.5);
    f.width = size(rng);
    f.height = size(rng);
    const double a = ang(rng);
    f.normal = Vec3(std::cos(a), std::sin(a), 0.0);
    DepthCamera cam;
    ZigzagConfig cfg;
    cfg.standoff = so(rng);
    const Path p = plan_zigzag(f, cam, cfg);
    const FaceBasis b = face_basis(f);
    const double face_yaw = std::atan2(-f.normal.y(), -f.normal.x());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Vec3 d = p.waypoints[i] - f.center;
      EXPECT_NEAR(d.dot(f.normal), cfg.standoff, 1e-9);
      EXPECT_LE(std::abs(d.dot(b.u)), f.width / 2 - cfg.margin + 1e-9);
      EXPECT_LE(std::abs(d.dot(b.v)), f.height / 2 - cfg.margin + 1e-9);
      EXPECT_NEAR(std::remainder(p.yaw[i] - face_yaw, 2 * std::numbers::pi), 0.0, 1e-9);
    }
  }
}

TEST(ZigzagPlanner, CoverageOracleAtLeast95Percent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> size(0.8, 8.0);
  std::uniform_real_distribution<double> so(0.5, 3.0);
  std::uniform_real_distribution<double> ov(0.0, 0.6);
  for (int trial = 0; trial < 40; ++trial) {
    FacePatch f = face_4x3();
    f.width = size(rng);
    f.height = size(rng);
    DepthCamera cam;
    ZigzagConfig cfg;
    cfg.standoff = so(rng);
    cfg.overlap_fraction = ov(rng);
    const Path p = plan_zigzag(f, cam, cfg);
    EXPECT_GE(covered_fraction(f, p, cam, cfg), 0.95) << "trial " << trial;
  }
}

TEST(ZigzagPlanner, VerticalNormalRejected) {
  FacePatch f = face_4x3();
  f.normal = Vec3::UnitZ();
  EXPECT_THROW(face_basis(f), InvalidSpec);
}
