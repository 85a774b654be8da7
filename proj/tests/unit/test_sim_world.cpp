#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tunnelscout/sim_world.hpp"

using namespace tunnelscout;

TEST(SimWorld, WindLevelSpeedsAndNames) {
  EXPECT_DOUBLE_EQ(hover_wind_speed(WindLevel::None), 0.0);
  EXPECT_DOUBLE_EQ(hover_wind_speed(WindLevel::Low), 2.30);
  EXPECT_DOUBLE_EQ(hover_wind_speed(WindLevel::Middle), 2.71);
  EXPECT_DOUBLE_EQ(hover_wind_speed(WindLevel::High), 3.24);
  EXPECT_DOUBLE_EQ(straight_wind_speed(WindLevel::Low), 1.86);
  EXPECT_DOUBLE_EQ(straight_wind_speed(WindLevel::Middle), 2.36);
  EXPECT_DOUBLE_EQ(straight_wind_speed(WindLevel::High), 2.71);
  for (WindLevel l : kAllWindLevels) EXPECT_EQ(parse_wind_level(to_string(l)), l);
  EXPECT_EQ(parse_wind_level("HIGH"), WindLevel::High);
  EXPECT_FALSE(parse_wind_level("gale").has_value());
}

TEST(SimWorld, RelativeFlowAccel) {
  EXPECT_EQ(relative_flow_accel(Vec3::Zero(), Vec3::Zero(), 0.1, 1.2), Vec3::Zero());
  const Vec3 w(2.0, -1.0, 0.5);
  EXPECT_NEAR(relative_flow_accel(w, w, 0.1, 1.2).norm(), 0.0, 1e-15);
  const double gain = 0.037;
  const Vec3 a = relative_flow_accel(Vec3(3.24, 0, 0), Vec3::Zero(), gain, 1.2);
  EXPECT_NEAR(a.x(), gain * 3.24 * 3.24 / 1.2, 1e-12);
  EXPECT_NEAR(a.y(), 0.0, 1e-15);
  // Still air, moving drone: drag opposes motion.
  const Vec3 d = relative_flow_accel(Vec3::Zero(), Vec3(1.0, 0, 0), gain, 1.2);
  EXPECT_LT(d.x(), 0.0);
}

TEST(SimWorld, EquilibriumStaysPut) {
  DroneState s;
  s.position = Vec3(1.0, 2.0, 1.0);
  const DynamicsParams p;
  for (int k = 0; k < 1000; ++k) controller_step(s, Vec3(1.0, 2.0, 1.0), 0.0, 1.0 / 120, p, Vec3::Zero());
  EXPECT_EQ(s.position, Vec3(1.0, 2.0, 1.0));
  EXPECT_EQ(s.velocity, Vec3::Zero());
}

TEST(SimWorld, ConstantWindSteadyStateOffset) {
  const DynamicsParams p;
  WindProfile wind;
  wind.speed = 2.71;
  wind.direction = Vec3::UnitX();
  wind.gain = 0.05;
  DroneState s;
  const double dt = 1.0 / 120;
  for (int k = 0; k < 120 * 30; ++k) {
    controller_step(s, Vec3::Zero(), 0.0, dt, p, wind_accel(wind, s.velocity, p.mass_kg));
  }
  const double expected = wind.gain * wind.speed * wind.speed / p.mass_kg / p.kp;
  EXPECT_NEAR(s.position.x(), expected, 0.01 * expected);
  EXPECT_NEAR(s.position.y(), 0.0, 1e-12);
}

TEST(SimWorld, StepResponseSettlesWithinFiveSeconds) {
  const DynamicsParams p;
  DroneState s;
  const double dt = 1.0 / 120;
  double settled_at = -1.0;
  for (int k = 1; k <= 120 * 10; ++k) {
    controller_step(s, Vec3(1.0, 0, 0), 0.0, dt, p, Vec3::Zero());
    const bool inside = std::abs(s.position.x() - 1.0) <= 0.02;
    if (inside && settled_at < 0) settled_at = k * dt;
    if (!inside) settled_at = -1.0;
  }
  ASSERT_GT(settled_at, 0.0);
  EXPECT_LT(settled_at, 5.0);
  // Frozen regression value for the default gains at 120 Hz.
  EXPECT_NEAR(settled_at, 2.833, 0.01);
}

TEST(SimWorld, SpeedClampAndYawRateLimit) {
  DynamicsParams p;
  DroneState s;
  for (int k = 0; k < 600; ++k) {
    controller_step(s, Vec3(50, 0, 0), 3.0, 1.0 / 120, p, Vec3::Zero());
    EXPECT_LE(s.velocity.norm(), p.v_max + 1e-12);
    EXPECT_LE(std::abs(s.yaw_rate), p.yaw_rate_max + 1e-12);
  }
  EXPECT_NEAR(s.yaw, 3.0, 0.05);
}

TEST(SimWorld, KineticEnergyDecaysWithoutWindOrError) {
  DynamicsParams p;
  DroneState s;
  s.velocity = Vec3(0.8, -0.3, 0.2);
  double prev = s.velocity.squaredNorm();
  for (int k = 0; k < 600; ++k) {
    controller_step(s, s.position, 0.0, 1.0 / 120, p, Vec3::Zero());
    const double e = s.velocity.squaredNorm();
    EXPECT_LE(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(SimWorld, ObstacleTriangleWave) {
  ObstacleTrack o;
  o.endpoint_a = Vec3(4, 1.2, 0);
  o.endpoint_b = Vec3(16, 1.2, 0);
  o.speed = 0.5;
  const double len = 12.0;
  EXPECT_NEAR((obstacle_pose(o, 0.0) - o.endpoint_a).norm(), 0.0, 1e-12);
  EXPECT_NEAR((obstacle_pose(o, len / o.speed) - o.endpoint_b).norm(), 0.0, 1e-9);
  EXPECT_NEAR((obstacle_pose(o, 2 * len / o.speed) - o.endpoint_a).norm(), 0.0, 1e-9);
  EXPECT_NEAR(obstacle_pose(o, 0.25 * len / o.speed).x(), 7.0, 1e-9);
  EXPECT_NEAR(obstacle_pose(o, 1.25 * len / o.speed).x(), 13.0, 1e-9);
  o.speed = 0.0;
  for (double t : {0.0, 3.0, 100.0}) EXPECT_EQ(obstacle_pose(o, t), o.endpoint_a);
  // Phase 0.5 starts at the far end.
  o.speed = 0.5;
  o.phase = 0.5;
  EXPECT_NEAR((obstacle_pose(o, 0.0) - o.endpoint_b).norm(), 0.0, 1e-12);
}

TEST(SimWorld, CollisionTest) {
  Scenario sc;
  const Scene scene = static_scene(sc.tunnel);
  EXPECT_FALSE(check_collision(Vec3(10, 0, 1.5), scene, 0.25));
  EXPECT_TRUE(check_collision(Vec3(10, 2.1, 1.5), scene, 0.25));  // inside the side wall
  EXPECT_TRUE(check_collision(Vec3(10, 1.8, 1.5), scene, 0.25));
  EXPECT_FALSE(check_collision(Vec3(10, 1.75, 1.5), scene, 0.25));  // exactly radius: strict

  Scene with_obstacle = scene;
  with_obstacle.cylinders.push_back({Vec3(8, 0, 0), 0.3, 1.8});
  EXPECT_FALSE(check_collision(Vec3(8.55, 0, 1.0), with_obstacle, 0.25));
  EXPECT_TRUE(check_collision(Vec3(8.54, 0, 1.0), with_obstacle, 0.25));
  EXPECT_FALSE(check_collision(Vec3(8.0, 0, 2.1), with_obstacle, 0.25));  // above the head
}

TEST(SimWorld, ScenarioValidation) {
  Scenario sc;
  EXPECT_NO_THROW(sc.validate());
  EXPECT_EQ(sc.substeps(), 4);

  Scenario weak = sc;
  weak.drone.available_thrust_g = 1500.0;
  EXPECT_THROW(weak.validate(), ScenarioInvalid);

  Scenario bad = sc;
  bad.tunnel.length = -1.0;
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
  bad = sc;
  bad.sim_dt = 0.01;
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
  bad = sc;
  bad.fusion_weight = 1.5;
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
  bad = sc;
  bad.obstacles.push_back({0.3, 1.8, Vec3::Zero(), Vec3::UnitX(), -1.0, 0.0});
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
  bad = sc;
  bad.zigzag.standoff = 5.0;
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
  bad = sc;
  bad.tunnel.axis = Vec3::UnitY();
  EXPECT_THROW(bad.validate(), ScenarioInvalid);
}

TEST(SimWorld, GroundTruthMapMatchesScene) {
  Scenario sc;
  sc.obstacles.push_back({0.3, 1.8, Vec3(6, 0, 0), Vec3(6, 0, 0), 0.0, 0.0});
  const VoxelMap map = ground_truth_map(sc, 0.0);
  for (std::size_t n = 0; n < map.voxel_count(); n += 97) EXPECT_TRUE(map.known(map.unlinear(n)));
  EXPECT_EQ(query(map, Vec3(10, 0, 1.5)), OccupancyState::Free);
  EXPECT_EQ(query(map, Vec3(6, 0, 1.0)), OccupancyState::Occupied);
  EXPECT_EQ(query(map, Vec3(10, 2.15, 1.5)), OccupancyState::Occupied);
  EXPECT_EQ(query(map, Vec3(20.15, 0, 1.5)), OccupancyState::Occupied);
  EXPECT_EQ(query(map, Vec3(10, 0, -0.15)), OccupancyState::Occupied);
  const Vec3 spawn = spawn_position(sc);
  EXPECT_EQ(query(map, spawn), OccupancyState::Free);
  EXPECT_FALSE(check_collision(spawn, scene_at(sc, 0.0), sc.drone_radius));
}

TEST(SimWorld, MapCoversTunnel) {
  Scenario sc;
  const VoxelMap map = make_map(sc);
  EXPECT_TRUE(map.index_of(Vec3(-0.9, -2.4, -0.4)).has_value());
  EXPECT_TRUE(map.index_of(Vec3(20.9, 2.4, 3.4)).has_value());
}
