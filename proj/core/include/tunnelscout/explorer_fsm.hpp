#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tunnelscout/path.hpp"
#include "tunnelscout/voxel_map.hpp"
#include "tunnelscout/zigzag_planner.hpp"

namespace tunnelscout {

enum class ExplorerState {
  Init,
  Forward,
  AfterInfoGatherForward,
  PreInspection,
  Inspection,
  Backward,
  AfterInfoGatherBackward,
  Stop,
};

enum class PlannerAction {
  TakeOff,
  LookAround,
  AddNewForwardPath,
  AddNewBackwardPath,
  RrtToGoal,
  ZigzagScan,
  HoverThenLand,
};

inline constexpr ExplorerState kAllStates[] = {
    ExplorerState::Init,       ExplorerState::Forward,  ExplorerState::AfterInfoGatherForward,
    ExplorerState::PreInspection, ExplorerState::Inspection, ExplorerState::Backward,
    ExplorerState::AfterInfoGatherBackward, ExplorerState::Stop,
};

inline constexpr PlannerAction kAllActions[] = {
    PlannerAction::TakeOff,           PlannerAction::LookAround, PlannerAction::AddNewForwardPath,
    PlannerAction::AddNewBackwardPath, PlannerAction::RrtToGoal,  PlannerAction::ZigzagScan,
    PlannerAction::HoverThenLand,
};

std::string_view to_string(ExplorerState s);
std::string_view to_string(PlannerAction a);

/// Outcomes observed since the previous step.
///  path_done: the active action finished (motion, rotation or climb).
///  path_found: result of the probe for the current phase (see probe_for).
///  collision_predicted: the active path is blocked just ahead.
///  scan_done: the zigzag sweep has been flown completely.
///  at_start: the drone is back within tolerance of the start point.
struct FsmEvents {
  bool path_done = false;
  bool path_found = false;
  bool collision_predicted = false;
  bool scan_done = false;
  bool at_start = false;
};

struct ExplorerContext {
  Pose pose;
  Vec3 start_position = Vec3::Zero();
  bool start_recorded = false;
  Vec3 tunnel_axis = Vec3::UnitX();
  PlannerAction active_action = PlannerAction::TakeOff;
  int lookaround_failures = 0;
  int max_lookaround_retries = 1;
};

struct FsmResult {
  ExplorerState next;
  PlannerAction action;
};

/// One transition. Updates ctx.active_action, the look-around counter and
/// records the start point when take-off completes. Throws
/// IllegalTransition for events that cannot occur in the given state.
FsmResult fsm_step(ExplorerState state, ExplorerContext& ctx, const FsmEvents& events);

enum class Probe { None, Forward, Backward };

/// Which candidate path path_found refers to in this state.
Probe probe_for(ExplorerState state);

/// Yaw setpoints for the look-around, unwrapped: right, left, back to start.
std::vector<double> look_around_sequence(double current_yaw);

inline constexpr double kForwardStep = 1.0;
inline constexpr double kAtStartTolerance = 0.25;

/// One-meter straight step along the current heading, if free.
std::optional<Path> try_forward(const VoxelMap& map, const Pose& pose, double inflate);

/// Step toward the start: up to 1 m back along the tunnel axis plus a
/// lateral correction toward the start line of at most 1 m.
std::optional<Path> try_backward(const VoxelMap& map, const Pose& pose, const Vec3& start,
                                 const Vec3& axis, double inflate);

bool at_start(const Vec3& position, const Vec3& start);

struct TunnelEnd {
  Vec3 goal;
  FacePatch face;
};

/// Deepest pocket of observed free space along the axis, pulled back by
/// the standoff. Throws NoFreeSpace when nothing is Free.
TunnelEnd detect_tunnel_end_goal(const VoxelMap& map, const ExplorerContext& ctx, double standoff);

}  // namespace tunnelscout
