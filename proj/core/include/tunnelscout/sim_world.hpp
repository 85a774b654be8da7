#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tunnelscout/drone_model.hpp"
#include "tunnelscout/rrt_planner.hpp"
#include "tunnelscout/sensor_sim.hpp"
#include "tunnelscout/voxel_map.hpp"
#include "tunnelscout/zigzag_planner.hpp"

namespace tunnelscout {

enum class WindLevel { None, Low, Middle, High };

inline constexpr WindLevel kAllWindLevels[] = {WindLevel::None, WindLevel::Low, WindLevel::Middle,
                                               WindLevel::High};

std::string_view to_string(WindLevel level);
std::optional<WindLevel> parse_wind_level(std::string_view text);

/// Fan speeds used in the hovering runs (wind along x), m/s.
double hover_wind_speed(WindLevel level);
/// Fan speeds used in the going-straight runs (wind along y), m/s.
double straight_wind_speed(WindLevel level);

struct WindProfile {
  WindLevel level = WindLevel::None;
  double speed = 0.0;
  Vec3 direction = Vec3::UnitX();
  double gain = 0.0;  ///< N per (m/s)^2

  Vec3 velocity() const { return speed * direction; }
};

/// Quadratic relative-flow force divided by mass. Also acts as drag when
/// the air is still.
Vec3 relative_flow_accel(const Vec3& wind_velocity, const Vec3& drone_velocity, double gain,
                         double mass_kg);
Vec3 wind_accel(const WindProfile& profile, const Vec3& drone_velocity, double mass_kg);

struct DynamicsParams {
  double kp = 4.0;
  double kd = 3.0;
  double v_max = 1.0;
  double mass_kg = 1.2;
  double yaw_gain = 3.0;
  double yaw_rate_max = 1.5;
};

struct DroneState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;  ///< unwrapped
  double yaw_rate = 0.0;
};

/// PD position loop plus external acceleration, semi-implicit Euler, speed
/// clamped to v_max. Yaw follows a rate-limited first-order law toward the
/// (unwrapped) target. Returns the resulting velocity command.
ControlCommand controller_step(DroneState& state, const Vec3& target, double target_yaw, double dt,
                               const DynamicsParams& params, const Vec3& external_accel);

struct ObstacleTrack {
  double radius = 0.3;
  double height = 1.8;
  Vec3 endpoint_a = Vec3::Zero();
  Vec3 endpoint_b = Vec3::Zero();
  double speed = 0.0;
  double phase = 0.0;
};

/// Back-and-forth motion between the endpoints (base point of the cylinder).
Vec3 obstacle_pose(const ObstacleTrack& track, double t);

/// Straight tunnel along +x: floor z=0, ceiling z=height, side walls at
/// y=+-width/2, dead-end wall at x=length, open entrance at x=0.
struct TunnelSpec {
  double length = 20.0;
  double width = 4.0;
  double height = 3.0;
  Vec3 axis = Vec3::UnitX();
  double wall_thickness = 0.3;
};

struct Scenario {
  TunnelSpec tunnel;
  std::vector<ObstacleTrack> obstacles;
  WindProfile wind;
  DroneSpec drone = DroneSpec::reference();
  DynamicsParams dynamics;
  DepthCamera camera;
  VoxelMapParams map;
  RrtConfig rrt;
  ZigzagConfig zigzag;
  double drone_radius = 0.25;
  double fusion_weight = 0.5;
  double localization_noise = 0.0;
  int max_lookaround_retries = 1;
  std::uint64_t rng_seed = 1;
  double sim_dt = 1.0 / 120.0;
  double planner_period = 1.0 / 30.0;
  double timeout = 300.0;

  /// Throws ScenarioInvalid (including a failed thrust check).
  void validate() const;
  int substeps() const;
};

Scene static_scene(const TunnelSpec& tunnel);
Scene scene_at(const Scenario& scenario, double t);

/// Grid spanning the tunnel with a margin around it.
VoxelMap make_map(const Scenario& scenario);

Vec3 spawn_position(const Scenario& scenario);

/// Ground-truth contact test, strict inequality at the boundary.
bool check_collision(const Vec3& position, const Scene& scene, double drone_radius);

/// Map with every voxel known: Occupied where the center lies inside the
/// scene at time t, Free elsewhere.
VoxelMap ground_truth_map(const Scenario& scenario, double t = 0.0);

}  // namespace tunnelscout
