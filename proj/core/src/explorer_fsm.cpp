#include "tunnelscout/explorer_fsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tunnelscout {

std::string_view to_string(ExplorerState s) {
  switch (s) {
    case ExplorerState::Init: return "Init";
    case ExplorerState::Forward: return "Forward";
    case ExplorerState::AfterInfoGatherForward: return "AfterInfoGatherForward";
    case ExplorerState::PreInspection: return "PreInspection";
    case ExplorerState::Inspection: return "Inspection";
    case ExplorerState::Backward: return "Backward";
    case ExplorerState::AfterInfoGatherBackward: return "AfterInfoGatherBackward";
    case ExplorerState::Stop: return "Stop";
  }
  return "?";
}

std::string_view to_string(PlannerAction a) {
  switch (a) {
    case PlannerAction::TakeOff: return "TakeOff";
    case PlannerAction::LookAround: return "LookAround";
    case PlannerAction::AddNewForwardPath: return "AddNewForwardPath";
    case PlannerAction::AddNewBackwardPath: return "AddNewBackwardPath";
    case PlannerAction::RrtToGoal: return "RrtToGoal";
    case PlannerAction::ZigzagScan: return "ZigzagScan";
    case PlannerAction::HoverThenLand: return "HoverThenLand";
  }
  return "?";
}

namespace {

FsmResult go(ExplorerContext& ctx, ExplorerState s, PlannerAction a) {
  ctx.active_action = a;
  return {s, a};
}

FsmResult forward_branch(ExplorerContext& ctx, bool path_found) {
  if (path_found) return go(ctx, ExplorerState::Forward, PlannerAction::AddNewForwardPath);
  ctx.lookaround_failures = 0;
  return go(ctx, ExplorerState::AfterInfoGatherForward, PlannerAction::LookAround);
}

FsmResult backward_branch(ExplorerContext& ctx, const FsmEvents& ev) {
  if (ev.at_start) return go(ctx, ExplorerState::Stop, PlannerAction::HoverThenLand);
  if (ev.path_found) return go(ctx, ExplorerState::Backward, PlannerAction::AddNewBackwardPath);
  return go(ctx, ExplorerState::AfterInfoGatherBackward, PlannerAction::LookAround);
}

[[noreturn]] void illegal(ExplorerState s, std::string_view what) {
  throw IllegalTransition(std::string(what) + " in state " + std::string(to_string(s)));
}

}  // namespace

FsmResult fsm_step(ExplorerState state, ExplorerContext& ctx, const FsmEvents& ev) {
  if (state == ExplorerState::Stop) return go(ctx, ExplorerState::Stop, PlannerAction::HoverThenLand);
  if (ev.scan_done && state != ExplorerState::Inspection) illegal(state, "scan_done");
  const FsmResult stay{state, ctx.active_action};

  switch (state) {
    case ExplorerState::Init:
      if (ctx.active_action == PlannerAction::TakeOff) {
        if (!ev.path_done) return stay;
        if (!ctx.start_recorded) {
          ctx.start_position = ctx.pose.position;
          ctx.start_recorded = true;
        }
        return go(ctx, ExplorerState::Init, PlannerAction::LookAround);
      }
      if (ctx.active_action == PlannerAction::LookAround) {
        if (!ev.path_done) return stay;
        return forward_branch(ctx, ev.path_found);
      }
      illegal(state, "unexpected active action");

    case ExplorerState::Forward:
      if (!ev.path_done && !ev.collision_predicted) return stay;
      return forward_branch(ctx, ev.path_found);

    case ExplorerState::AfterInfoGatherForward:
      if (!ev.path_done) return stay;
      if (ev.path_found) {
        ctx.lookaround_failures = 0;
        return go(ctx, ExplorerState::Forward, PlannerAction::AddNewForwardPath);
      }
      ++ctx.lookaround_failures;
      if (ctx.lookaround_failures >= ctx.max_lookaround_retries) {
        return go(ctx, ExplorerState::PreInspection, PlannerAction::RrtToGoal);
      }
      return go(ctx, ExplorerState::AfterInfoGatherForward, PlannerAction::LookAround);

    case ExplorerState::PreInspection:
      if (ev.path_done) return go(ctx, ExplorerState::Inspection, PlannerAction::ZigzagScan);
      if (ev.collision_predicted) return go(ctx, ExplorerState::PreInspection, PlannerAction::RrtToGoal);
      return stay;

    case ExplorerState::Inspection:
      if (ev.scan_done) return backward_branch(ctx, ev);
      if (ev.path_done) illegal(state, "path_done without scan_done");
      if (ev.collision_predicted) return go(ctx, ExplorerState::Inspection, PlannerAction::ZigzagScan);
      return stay;

    case ExplorerState::Backward:
      if (!ev.path_done && !ev.collision_predicted) return stay;
      return backward_branch(ctx, ev);

    case ExplorerState::AfterInfoGatherBackward:
      if (ctx.active_action == PlannerAction::LookAround) {
        if (!ev.path_done) return stay;
        if (ev.at_start) return go(ctx, ExplorerState::Stop, PlannerAction::HoverThenLand);
        if (ev.path_found) return go(ctx, ExplorerState::Backward, PlannerAction::AddNewBackwardPath);
        return go(ctx, ExplorerState::AfterInfoGatherBackward, PlannerAction::RrtToGoal);
      }
      if (ctx.active_action == PlannerAction::RrtToGoal) {
        if (ev.path_done) return go(ctx, ExplorerState::Stop, PlannerAction::HoverThenLand);
        if (ev.collision_predicted) {
          return go(ctx, ExplorerState::AfterInfoGatherBackward, PlannerAction::RrtToGoal);
        }
        return stay;
      }
      illegal(state, "unexpected active action");

    case ExplorerState::Stop:
      break;
  }
  return go(ctx, ExplorerState::Stop, PlannerAction::HoverThenLand);
}

Probe probe_for(ExplorerState state) {
  switch (state) {
    case ExplorerState::Init:
    case ExplorerState::Forward:
    case ExplorerState::AfterInfoGatherForward:
      return Probe::Forward;
    case ExplorerState::Inspection:
    case ExplorerState::Backward:
    case ExplorerState::AfterInfoGatherBackward:
      return Probe::Backward;
    default:
      return Probe::None;
  }
}

std::vector<double> look_around_sequence(double current_yaw) {
  constexpr double kQuarter = std::numbers::pi / 2.0;
  return {current_yaw - kQuarter, current_yaw + kQuarter, current_yaw};
}

std::optional<Path> try_forward(const VoxelMap& map, const Pose& pose, double inflate) {
  const Vec3 to = pose.position + pose.heading() * kForwardStep;
  if (!segment_collision_check(map, pose.position, to, inflate)) return std::nullopt;
  Path p;
  p.waypoints = {pose.position, to};
  p.yaw = {pose.yaw, pose.yaw};
  return p;
}

std::optional<Path> try_backward(const VoxelMap& map, const Pose& pose, const Vec3& start,
                                 const Vec3& axis, double inflate) {
  const Vec3 a = axis.normalized();
  const Vec3 to_start = start - pose.position;
  const double along = to_start.dot(a);
  Vec3 lateral = to_start - along * a;
  if (lateral.norm() > kForwardStep) lateral *= kForwardStep / lateral.norm();
  const double step = std::clamp(along, -kForwardStep, kForwardStep);
  const Vec3 target = pose.position + step * a + lateral;
  const Vec3 delta = target - pose.position;
  if (delta.norm() < 1e-9) return std::nullopt;
  if (!segment_collision_check(map, pose.position, target, inflate)) return std::nullopt;
  const double heading = std::atan2(delta.y(), delta.x());
  const double yaw = delta.head<2>().norm() > 1e-6 ? heading : pose.yaw;
  Path p;
  p.waypoints = {pose.position, target};
  p.yaw = {yaw, yaw};
  return p;
}

bool at_start(const Vec3& position, const Vec3& start) {
  return (position - start).norm() <= kAtStartTolerance;
}

TunnelEnd detect_tunnel_end_goal(const VoxelMap& map, const ExplorerContext& ctx, double standoff) {
  const Vec3 axis = ctx.tunnel_axis.normalized();
  FacePatch probe;
  probe.normal = -axis;
  const FaceBasis basis = face_basis(probe);
  const double res = map.resolution();

  double d_max = -std::numeric_limits<double>::infinity();
  double d_min = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> free_cells;
  for (std::size_t n = 0; n < map.voxel_count(); ++n) {
    const Index3 idx = map.unlinear(n);
    if (map.state(idx) != OccupancyState::Free) continue;
    const double d = map.center_of(idx).dot(axis);
    d_max = std::max(d_max, d);
    d_min = std::min(d_min, d);
    free_cells.push_back(n);
  }
  if (free_cells.empty()) throw NoFreeSpace("map holds no free voxel");

  // Deepest layer, split into 26-connected pockets.
  const double layer = d_max - res - 1e-9;
  std::vector<Index3> deep;
  for (std::size_t n : free_cells) {
    if (map.center_of(map.unlinear(n)).dot(axis) >= layer) deep.push_back(map.unlinear(n));
  }
  std::sort(deep.begin(), deep.end(), [](const Index3& a, const Index3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  // Largest pocket wins; stray voxels punched into the wall by noisy rays
  // form small ones. Ties go to the pocket found first.
  std::vector<char> taken(deep.size(), 0);
  std::vector<std::size_t> component;
  for (std::size_t seed = 0; seed < deep.size(); ++seed) {
    if (taken[seed]) continue;
    std::vector<std::size_t> pocket{seed};
    taken[seed] = 1;
    for (std::size_t head = 0; head < pocket.size(); ++head) {
      const Index3 c = deep[pocket[head]];
      for (std::size_t k = 0; k < deep.size(); ++k) {
        if (taken[k]) continue;
        if ((deep[k] - c).cwiseAbs().maxCoeff() <= 1) {
          taken[k] = 1;
          pocket.push_back(k);
        }
      }
    }
    if (pocket.size() > component.size()) component = std::move(pocket);
  }
  Vec3 centroid = Vec3::Zero();
  for (std::size_t k : component) centroid += map.center_of(deep[k]);
  centroid /= static_cast<double>(component.size());

  const double face_d = d_max + 0.5 * res;
  const double goal_d = std::max(face_d - standoff, d_min);
  TunnelEnd out;
  out.goal = centroid - centroid.dot(axis) * axis + goal_d * axis;

  // Rectangle around the free space just in front of the face, grown by the
  // observed wall surface: Occupied voxels with a Free voxel on the near side.
  double u0 = std::numeric_limits<double>::infinity();
  double u1 = -u0;
  double v0 = u0;
  double v1 = -u0;
  auto grow = [&](const Vec3& c) {
    u0 = std::min(u0, c.dot(basis.u));
    u1 = std::max(u1, c.dot(basis.u));
    v0 = std::min(v0, c.dot(basis.v));
    v1 = std::max(v1, c.dot(basis.v));
  };
  const double slab = d_max - standoff - res - 1e-9;
  for (std::size_t n : free_cells) {
    const Vec3 c = map.center_of(map.unlinear(n));
    if (c.dot(axis) >= slab) grow(c);
  }
  const Vec3 back = -axis * res;
  for (std::size_t n = 0; n < map.voxel_count(); ++n) {
    const Index3 idx = map.unlinear(n);
    const Vec3 c = map.center_of(idx);
    if (c.dot(axis) < d_max - 1e-9 || c.dot(axis) > d_max + 2.0 * res + 1e-9) continue;
    if (map.state(idx) != OccupancyState::Occupied) continue;
    if (query(map, c + back) == OccupancyState::Free) grow(c);
  }
  out.face.normal = -axis;
  out.face.width = (u1 - u0) + res;
  out.face.height = (v1 - v0) + res;
  out.face.center = face_d * axis + 0.5 * (u0 + u1) * basis.u + 0.5 * (v0 + v1) * basis.v;
  return out;
}

}  // namespace tunnelscout
