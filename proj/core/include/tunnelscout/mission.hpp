#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tunnelscout/explorer_fsm.hpp"
#include "tunnelscout/sim_world.hpp"

namespace tunnelscout {

struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  ExplorerState state = ExplorerState::Init;
  PlannerAction action = PlannerAction::TakeOff;
  WindLevel wind = WindLevel::None;
};

struct RunReport {
  std::uint64_t seed = 0;
  bool stopped = false;    ///< FSM reached Stop
  bool landed = false;     ///< landing finished before the timeout
  bool timed_out = false;
  bool reached_end = false;
  double min_distance_to_end = 0.0;   ///< closest approach to the dead-end wall, m
  double coverage_fraction = 0.0;     ///< of the margin-shrunk dead-end face
  double return_to_start_error = 0.0; ///< horizontal, landing point vs start point, m
  int collision_count = 0;            ///< distinct ground-truth contact episodes
  int planner_ticks = 0;
  double tick_mean_ms = 0.0;
  double tick_p99_ms = 0.0;
  double tick_max_ms = 0.0;
  double sim_duration = 0.0;
  double wall_clock_s = 0.0;
  int rrt_plans = 0;
  int rrt_failures = 0;
  ExplorerState final_state = ExplorerState::Init;
  std::vector<ExplorerState> states_visited;  ///< in order of entry
};

struct RunResult {
  RunReport report;
  std::vector<TrajectorySample> trajectory;
  VoxelMap map;
};

/// Simulates the full mission. Throws ScenarioInvalid for a bad scenario;
/// a timeout is reported, not raised.
RunResult run_scenario(const Scenario& scenario);

/// "t,x,y,z,yaw,fsm_state,action,wind_level" plus one row per sample.
std::string trajectory_csv(const std::vector<TrajectorySample>& samples);

/// Face points (5 cm grid) on the margin-shrunk dead-end wall.
std::vector<Vec3> coverage_grid(const Scenario& scenario, double spacing = 0.05);

/// Whether the camera at `pose` sees `point` unoccluded and within range.
bool camera_sees(const Scene& scene, const DepthCamera& camera, const Pose& pose, const Vec3& point);

}  // namespace tunnelscout
