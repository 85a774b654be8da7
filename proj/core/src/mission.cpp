#include "tunnelscout/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace tunnelscout {

namespace {

constexpr double kStopTol = 0.1;
constexpr double kPassTol = 0.3;
constexpr double kSettledSpeed = 0.1;
constexpr double kYawTol = 0.05;
constexpr double kAlignTol = 0.1;
constexpr double kLookahead = 1.5;
constexpr double kBodyClear = 0.6;
constexpr double kDwell = 0.2;
constexpr double kHoverTime = 3.0;
constexpr double kLandZ = 0.3;
constexpr double kTakeoffZ = 1.0;
constexpr double kBlockedSkip = 2.5;
constexpr double kInwardStep = 0.05;
constexpr double kEscapeRadius = 0.5;
constexpr double kSurveyBackoff = 2.0;
constexpr double kMaxLaneShift = 0.3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Follow {
  std::vector<Vec3> wps;
  std::vector<char> stop;
  std::vector<double> yaw;  // NaN: face the direction of travel
  std::size_t idx = 0;
  bool aligning = true;
  Vec3 hold = Vec3::Zero();
  bool blocked = false;
  Vec3 block_hold = Vec3::Zero();
  double blocked_for = 0.0;

  bool done() const { return idx >= wps.size(); }
  void add(const Vec3& p, bool is_stop, double heading) {
    wps.push_back(p);
    stop.push_back(is_stop ? 1 : 0);
    yaw.push_back(heading);
  }
};

struct FollowStatus {
  bool done = false;
  bool blocked = false;
};

enum class ZigPhase { Survey, Climb, Look, Sweep, Finished };

class Mission {
 public:
  explicit Mission(const Scenario& sc)
      : sc_(sc), map_(make_map(sc)), rng_(sc.rng_seed), coverage_points_(coverage_grid(sc)) {
    covered_.assign(coverage_points_.size(), 0);
    drone_.position = spawn_position(sc);
    drone_.yaw = 0.0;
    yaw_cmd_ = 0.0;
    est_ = drone_.position;
    takeoff_point_ = Vec3(drone_.position.x(), drone_.position.y(), kTakeoffZ);
    target_ = drone_.position;
    ctx_.tunnel_axis = sc.tunnel.axis.normalized();
    ctx_.max_lookaround_retries = sc.max_lookaround_retries;
    ctx_.active_action = PlannerAction::TakeOff;
    action_ = PlannerAction::TakeOff;
    report_.seed = sc.rng_seed;
    report_.states_visited.push_back(state_);
    report_.min_distance_to_end = std::numeric_limits<double>::infinity();
  }

  RunResult run() {
    const auto wall_start = std::chrono::steady_clock::now();
    const int substeps = sc_.substeps();
    const double dt = sc_.planner_period / substeps;
    long tick_index = 0;
    while (!landed_) {
      const double t = static_cast<double>(tick_index) * sc_.planner_period;
      if (t >= sc_.timeout) {
        report_.timed_out = true;
        break;
      }
      tick(t);
      for (int k = 0; k < substeps; ++k) {
        const double ts = t + (k + 1) * dt;
        const Vec3 ext = wind_accel(sc_.wind, drone_.velocity, sc_.dynamics.mass_kg);
        controller_step(drone_, target_, yaw_cmd_, dt, sc_.dynamics, ext);
        const Scene scene = scene_at(sc_, ts);
        const bool hit = check_collision(drone_.position, scene, sc_.drone_radius);
        if (hit && !in_contact_) ++report_.collision_count;
        in_contact_ = hit;
        report_.min_distance_to_end =
            std::min(report_.min_distance_to_end, sc_.tunnel.length - drone_.position.x());
      }
      ++tick_index;
    }
    report_.sim_duration = static_cast<double>(tick_index) * sc_.planner_period;
    report_.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    finish_report();
    RunResult out{report_, std::move(log_), std::move(map_)};
    return out;
  }

 private:
  // --- per tick -----------------------------------------------------------

  void tick(double t) {
    const Scene scene = scene_at(sc_, t);
    Vec3 loc = drone_.position;
    if (sc_.localization_noise > 0.0) {
      std::normal_distribution<double> n(0.0, sc_.localization_noise);
      loc += Vec3(n(rng_), n(rng_), n(rng_));
    }
    est_ = fuse_state_estimate(drone_.position, loc, sc_.fusion_weight).estimate;
    const Pose true_pose(drone_.position, drone_.yaw);
    DepthScan scan = render_depth_scan(scene, sc_.camera, true_pose, &rng_);
    scan.sensor_pose.position = est_;

    const auto t0 = std::chrono::steady_clock::now();
    insert_scan(map_, scan);
    if (airborne()) clear_unknown_sphere(map_, est_, kBodyClear);
    ctx_.pose = Pose(est_, yaw_cmd_);
    decide();
    const auto t1 = std::chrono::steady_clock::now();
    tick_ms_.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

    if (state_ == ExplorerState::Inspection) accumulate_coverage(scene, true_pose);

    TrajectorySample s;
    s.t = t;
    s.position = drone_.position;
    s.yaw = normalize_yaw(drone_.yaw);
    s.state = state_;
    s.action = action_;
    s.wind = sc_.wind.level;
    log_.push_back(s);
  }

  bool airborne() const {
    if (state_ == ExplorerState::Stop) return false;
    return !(state_ == ExplorerState::Init && action_ == PlannerAction::TakeOff);
  }

  void decide() {
    FsmEvents ev;
    progress(ev);
    ev.at_start = ctx_.start_recorded && at_start(est_, ctx_.start_position);
    const bool decision = ev.path_done || ev.collision_predicted || ev.scan_done;
    std::optional<Path> probe;
    if (decision) {
      switch (probe_for(state_)) {
        case Probe::Forward:
          probe = try_forward(map_, ctx_.pose, sc_.drone_radius);
          break;
        case Probe::Backward:
          probe = try_backward(map_, ctx_.pose, ctx_.start_position, ctx_.tunnel_axis,
                               sc_.drone_radius);
          break;
        case Probe::None:
          break;
      }
      ev.path_found = probe.has_value();
    }
    const ExplorerState before = state_;
    const FsmResult res = fsm_step(state_, ctx_, ev);
    state_ = res.next;
    if (state_ != before) report_.states_visited.push_back(state_);
    if (!decision) return;
    const bool resume = before == ExplorerState::Inspection && res.next == ExplorerState::Inspection &&
                        res.action == PlannerAction::ZigzagScan;
    if (!resume) enter(res.action, probe);
  }

  void enter(PlannerAction action, const std::optional<Path>& probe) {
    action_ = action;
    action_failed_ = false;
    follow_ = Follow{};
    switch (action) {
      case PlannerAction::TakeOff:
        break;
      case PlannerAction::LookAround:
        start_look(yaw_cmd_);
        break;
      case PlannerAction::AddNewForwardPath:
      case PlannerAction::AddNewBackwardPath:
        if (!probe) {
          action_failed_ = true;
          break;
        }
        follow_.hold = est_;
        {
          const Vec3 end = probe->back();
          const bool is_stop = action == PlannerAction::AddNewBackwardPath &&
                               (end - ctx_.start_position).norm() < 1e-6;
          follow_.add(end, is_stop, probe->yaw.back());
        }
        break;
      case PlannerAction::RrtToGoal:
        start_rrt();
        break;
      case PlannerAction::ZigzagScan:
        start_zigzag();
        break;
      case PlannerAction::HoverThenLand:
        stop_hold_ = est_;
        stop_timer_ = 0.0;
        break;
    }
  }

  void progress(FsmEvents& ev) {
    switch (action_) {
      case PlannerAction::TakeOff:
        target_ = takeoff_point_;
        ev.path_done = settled_at(takeoff_point_);
        break;
      case PlannerAction::LookAround:
        target_ = look_hold_;
        ev.path_done = look_step();
        break;
      case PlannerAction::AddNewForwardPath:
      case PlannerAction::AddNewBackwardPath:
      case PlannerAction::RrtToGoal: {
        if (action_failed_) {
          target_ = est_;
          ev.path_done = true;
          break;
        }
        const FollowStatus st = follow_step(follow_);
        ev.path_done = st.done;
        ev.collision_predicted = st.blocked;
        break;
      }
      case PlannerAction::ZigzagScan:
        zigzag_step(ev);
        break;
      case PlannerAction::HoverThenLand:
        stop_timer_ += sc_.planner_period;
        target_ = stop_hold_;
        if (stop_timer_ >= kHoverTime) {
          target_.z() = kLandZ;
          if (drone_.position.z() <= kLandZ + 0.05 && drone_.velocity.norm() < 0.05) landed_ = true;
        }
        break;
    }
  }

  // --- motion primitives --------------------------------------------------

  bool settled_at(const Vec3& p) const {
    return (est_ - p).norm() <= kStopTol && drone_.velocity.norm() < kSettledSpeed;
  }

  double unwrap_near(double heading) const {
    return yaw_cmd_ + normalize_yaw(heading - yaw_cmd_);
  }

  void start_look(double yaw) {
    look_ = look_around_sequence(yaw);
    look_idx_ = 0;
    look_dwell_ = 0.0;
    look_hold_ = est_;
  }

  bool look_step() {
    if (look_idx_ >= look_.size()) return true;
    yaw_cmd_ = look_[look_idx_];
    if (std::abs(drone_.yaw - yaw_cmd_) <= kYawTol) {
      look_dwell_ += sc_.planner_period;
      if (look_dwell_ >= kDwell) {
        ++look_idx_;
        look_dwell_ = 0.0;
      }
    }
    return look_idx_ >= look_.size();
  }

  bool lookahead_blocked(const Follow& f) const {
    // Starting inside the margin (after drift, or next to a wall that just
    // got mapped) must not freeze the drone: the first leg is checked with
    // whatever clearance it currently has.
    double first = sc_.drone_radius;
    while (first > 0.0 && !segment_collision_check(map_, est_, est_, first)) first -= kInwardStep;
    first = std::max(first, 0.0);
    double budget = kLookahead;
    Vec3 a = est_;
    for (std::size_t i = f.idx; i < f.wps.size() && budget > 0.0; ++i) {
      Vec3 b = f.wps[i];
      const double len = (b - a).norm();
      if (len > budget) b = a + (b - a) * (budget / len);
      const double inflate = i == f.idx ? first : sc_.drone_radius;
      if (!segment_collision_check(map_, a, b, inflate)) return true;
      budget -= len;
      a = b;
    }
    return false;
  }

  FollowStatus follow_step(Follow& f) {
    FollowStatus st;
    if (f.done()) {
      st.done = true;
      return st;
    }
    const Vec3& wp = f.wps[f.idx];
    if (f.aligning) {
      double heading = f.yaw[f.idx];
      if (std::isnan(heading)) {
        const Vec3 d = wp - f.hold;
        heading = d.head<2>().norm() > 0.2 ? std::atan2(d.y(), d.x()) : yaw_cmd_;
      }
      yaw_cmd_ = unwrap_near(heading);
      target_ = f.hold;
      if (std::abs(drone_.yaw - yaw_cmd_) > kAlignTol) return st;
      f.aligning = false;
    }
    if (lookahead_blocked(f)) {
      if (!f.blocked) f.block_hold = est_;
      f.blocked = true;
      f.blocked_for += sc_.planner_period;
      target_ = f.block_hold;
      st.blocked = true;
      return st;
    }
    f.blocked = false;
    f.blocked_for = 0.0;
    target_ = wp;
    const double dist = (est_ - wp).norm();
    const bool reached = f.stop[f.idx] ? settled_at(wp) : dist <= kPassTol;
    if (reached) {
      ++f.idx;
      f.hold = est_;
      f.aligning = true;
      if (f.done()) {
        target_ = f.stop[f.idx - 1] ? wp : est_;
        st.done = true;
      }
    }
    return st;
  }

  Vec3 escape_point(const CollisionChecker& checker, const Vec3& p, double inflate) const {
    if (checker.point_free(p, inflate)) return p;
    const double res = map_.resolution();
    const int reach = static_cast<int>(std::ceil(kEscapeRadius / res));
    Vec3 best = p;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = -reach; i <= reach; ++i) {
      for (int j = -reach; j <= reach; ++j) {
        for (int k = -reach; k <= reach; ++k) {
          const Vec3 q = p + res * Vec3(i, j, k);
          const double d = (q - p).norm();
          if (d > kEscapeRadius || d >= best_d) continue;
          if (checker.point_free(q, inflate)) {
            best = q;
            best_d = d;
          }
        }
      }
    }
    return best;
  }

  void start_rrt() {
    const bool to_end = state_ == ExplorerState::PreInspection;
    Vec3 goal = ctx_.start_position;
    try {
      if (to_end) goal = detect_tunnel_end_goal(map_, ctx_, sc_.zigzag.standoff).goal;
      RrtConfig cfg = sc_.rrt;
      cfg.inflate = sc_.drone_radius;
      cfg.rng_seed = sc_.rng_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(++plans_);
      const CollisionChecker checker(map_);
      ++report_.rrt_plans;
      // Drift or fresh wall hits can leave the estimate inside the inflated
      // margin; plan from the nearest free point instead.
      const Vec3 from = escape_point(checker, est_, cfg.inflate);
      const Path path = plan_smoothed(checker, from, goal, cfg);
      follow_.hold = est_;
      if (from != est_) follow_.add(from, false, kNaN);
      for (std::size_t i = 1; i < path.size(); ++i) {
        follow_.add(path.waypoints[i], i + 1 == path.size(), kNaN);
      }
    } catch (const Error&) {
      ++report_.rrt_failures;
      action_failed_ = true;
    }
  }

  // --- zigzag -------------------------------------------------------------

  /// Fits the face from the current map and lays out the lanes. Returns the
  /// top lane's height at the face center.
  Vec3 plan_sweep() {
    const TunnelEnd end = detect_tunnel_end_goal(map_, ctx_, sc_.zigzag.standoff);
    const Path sweep = plan_zigzag(end.face, sc_.camera, sc_.zigzag);
    zig_basis_ = face_basis(end.face);
    zig_center_ = end.face.center;
    zig_yaw_ = sweep.yaw.front();
    zig_wps_ = sweep.waypoints;
    zig_idx_ = 0;
    Vec3 top = zig_wps_.front();
    top -= zig_basis_.u * (top - zig_center_).dot(zig_basis_.u);
    return top;
  }

  // The camera never sees far above or below its own height, so the band
  // the outer lanes need is still Unknown on arrival. The survey backs off
  // along the mapped line, climbs as far as the map allows and looks
  // around, which exposes the face's upper band from a distance.
  void start_zigzag() {
    zig_phase_ = ZigPhase::Finished;
    zig_wps_.clear();
    zig_idx_ = 0;
    try {
      zig_top_ = plan_sweep();
      const Vec3& axis = zig_basis_.axis;
      const Vec3 back = est_ + axis * ((zig_top_ - est_).dot(axis) - kSurveyBackoff);
      follow_ = Follow{};
      follow_.hold = est_;
      follow_.add(back, true, zig_yaw_);
      zig_phase_ = ZigPhase::Survey;
    } catch (const Error&) {
      zig_phase_ = ZigPhase::Finished;
    }
  }

  void start_climb() {
    const double dz = zig_top_.z() - est_.z();
    const double sign = dz >= 0.0 ? 1.0 : -1.0;
    Vec3 goal = est_;
    for (double h = std::abs(dz); h > 0.0; h -= kInwardStep) {
      const Vec3 p = est_ + Vec3(0.0, 0.0, sign * h);
      if (segment_collision_check(map_, est_, p, sc_.drone_radius)) {
        goal = p;
        break;
      }
    }
    follow_ = Follow{};
    follow_.hold = est_;
    follow_.aligning = false;
    follow_.add(goal, true, zig_yaw_);
    zig_phase_ = ZigPhase::Climb;
  }

  /// Nudges a sweep waypoint toward the face center, sideways first, then
  /// vertically, until it is free.
  std::optional<Vec3> feasible_waypoint(const Vec3& wp) const {
    const double off_u = (wp - zig_center_).dot(zig_basis_.u);
    const double off_v = (wp - zig_center_).dot(zig_basis_.v);
    const double su = off_u >= 0.0 ? 1.0 : -1.0;
    const double sv = off_v >= 0.0 ? 1.0 : -1.0;
    const double max_v = std::min(std::abs(off_v), kMaxLaneShift);
    for (double dv = 0.0; dv <= max_v + 1e-9; dv += kInwardStep) {
      for (double du = 0.0; du <= std::abs(off_u) + 1e-9; du += kInwardStep) {
        const Vec3 p = wp - su * du * zig_basis_.u - sv * dv * zig_basis_.v;
        if (segment_collision_check(map_, p, p, sc_.drone_radius)) return p;
      }
    }
    return std::nullopt;
  }

  bool next_sweep_target() {
    while (zig_idx_ < zig_wps_.size()) {
      const auto wp = feasible_waypoint(zig_wps_[zig_idx_]);
      ++zig_idx_;
      if (!wp) continue;
      follow_ = Follow{};
      follow_.hold = est_;
      follow_.aligning = false;
      follow_.add(*wp, true, zig_yaw_);
      return true;
    }
    return false;
  }

  void zigzag_step(FsmEvents& ev) {
    switch (zig_phase_) {
      case ZigPhase::Survey:
      case ZigPhase::Climb: {
        const FollowStatus st = follow_step(follow_);
        ev.collision_predicted = st.blocked;
        if (st.blocked && follow_.blocked_for > kBlockedSkip) {
          follow_.idx = follow_.wps.size();
          target_ = est_;
        }
        if (follow_.done()) {
          if (zig_phase_ == ZigPhase::Survey) {
            start_climb();
          } else {
            start_look(yaw_cmd_);
            zig_phase_ = ZigPhase::Look;
          }
        }
        break;
      }
      case ZigPhase::Look:
        target_ = look_hold_;
        if (look_step()) {
          try {
            plan_sweep();
          } catch (const Error&) {
            // keep the first layout
          }
          zig_phase_ = next_sweep_target() ? ZigPhase::Sweep : ZigPhase::Finished;
        }
        break;
      case ZigPhase::Sweep: {
        yaw_cmd_ = unwrap_near(zig_yaw_);
        const FollowStatus st = follow_step(follow_);
        ev.collision_predicted = st.blocked;
        bool advance = st.done;
        if (st.blocked && follow_.blocked_for > kBlockedSkip) {
          advance = true;
          target_ = est_;
        }
        if (advance && !next_sweep_target()) zig_phase_ = ZigPhase::Finished;
        break;
      }
      case ZigPhase::Finished:
        target_ = est_;
        break;
    }
    if (zig_phase_ == ZigPhase::Finished) {
      ev.scan_done = true;
      ev.collision_predicted = false;
    }
  }

  // --- metrics ------------------------------------------------------------

  void accumulate_coverage(const Scene& scene, const Pose& pose) {
    for (std::size_t i = 0; i < coverage_points_.size(); ++i) {
      if (covered_[i]) continue;
      if (camera_sees(scene, sc_.camera, pose, coverage_points_[i])) covered_[i] = 1;
    }
  }

  void finish_report() {
    report_.stopped = state_ == ExplorerState::Stop;
    report_.landed = landed_;
    report_.final_state = state_;
    report_.reached_end = report_.min_distance_to_end <= sc_.zigzag.standoff + 0.5;
    std::size_t n = 0;
    for (char c : covered_) n += c ? 1 : 0;
    report_.coverage_fraction =
        covered_.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(covered_.size());
    report_.return_to_start_error =
        ctx_.start_recorded ? (drone_.position - ctx_.start_position).head<2>().norm()
                            : std::numeric_limits<double>::infinity();
    report_.planner_ticks = static_cast<int>(tick_ms_.size());
    if (!tick_ms_.empty()) {
      double sum = 0.0;
      for (double v : tick_ms_) sum += v;
      report_.tick_mean_ms = sum / static_cast<double>(tick_ms_.size());
      std::vector<double> sorted = tick_ms_;
      std::sort(sorted.begin(), sorted.end());
      const auto k = static_cast<std::size_t>(
          std::ceil(0.99 * static_cast<double>(sorted.size()))) - 1;
      report_.tick_p99_ms = sorted[std::min(k, sorted.size() - 1)];
      report_.tick_max_ms = sorted.back();
    }
  }

  const Scenario& sc_;
  VoxelMap map_;
  std::mt19937_64 rng_;
  DroneState drone_;
  Vec3 est_;
  Vec3 target_;
  double yaw_cmd_ = 0.0;
  Vec3 takeoff_point_;

  ExplorerState state_ = ExplorerState::Init;
  ExplorerContext ctx_;
  PlannerAction action_;
  bool action_failed_ = false;
  Follow follow_;
  std::vector<double> look_;
  std::size_t look_idx_ = 0;
  double look_dwell_ = 0.0;
  Vec3 look_hold_ = Vec3::Zero();

  ZigPhase zig_phase_ = ZigPhase::Finished;
  Vec3 zig_top_ = Vec3::Zero();
  std::vector<Vec3> zig_wps_;
  std::size_t zig_idx_ = 0;
  FaceBasis zig_basis_{};
  Vec3 zig_center_ = Vec3::Zero();
  double zig_yaw_ = 0.0;

  Vec3 stop_hold_ = Vec3::Zero();
  double stop_timer_ = 0.0;
  bool landed_ = false;
  bool in_contact_ = false;
  std::uint64_t plans_ = 0;

  std::vector<Vec3> coverage_points_;
  std::vector<char> covered_;
  std::vector<double> tick_ms_;
  std::vector<TrajectorySample> log_;
  RunReport report_;
};

}  // namespace

std::vector<Vec3> coverage_grid(const Scenario& sc, double spacing) {
  const TunnelSpec& t = sc.tunnel;
  const double m = sc.zigzag.margin;
  const double y0 = -0.5 * t.width + m;
  const double y1 = 0.5 * t.width - m;
  const double z0 = m;
  const double z1 = t.height - m;
  std::vector<Vec3> pts;
  if (!(y1 > y0) || !(z1 > z0)) return pts;
  const int ny = std::max(1, static_cast<int>(std::round((y1 - y0) / spacing)));
  const int nz = std::max(1, static_cast<int>(std::round((z1 - z0) / spacing)));
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < ny; ++i) {
      pts.emplace_back(t.length, y0 + (i + 0.5) * (y1 - y0) / ny, z0 + (j + 0.5) * (z1 - z0) / nz);
    }
  }
  return pts;
}

bool camera_sees(const Scene& scene, const DepthCamera& camera, const Pose& pose, const Vec3& point) {
  const Vec3 d = point - pose.position;
  const double range = d.norm();
  if (!(range > 1e-9) || range > camera.max_range) return false;
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const double xl = c * d.x() + s * d.y();
  const double yl = -s * d.x() + c * d.y();
  const double zl = d.z();
  if (xl <= 0.0) return false;
  constexpr double kDeg = std::numbers::pi / 180.0;
  if (std::abs(std::atan2(yl, xl)) > 0.5 * camera.h_fov_deg * kDeg) return false;
  if (std::abs(std::atan2(zl, xl)) > 0.5 * camera.v_fov_deg * kDeg) return false;
  const auto hit = raycast(scene, pose.position, d / range, range);
  return !hit || *hit >= range - 1e-6;
}

RunResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  Mission mission(scenario);
  return mission.run();
}

std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::string out = "t,x,y,z,yaw,fsm_state,action,wind_level\n";
  char buf[256];
  for (const TrajectorySample& s : samples) {
    const int n = std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%s,%s,%s\n", s.t,
                                s.position.x(), s.position.y(), s.position.z(), s.yaw,
                                std::string(to_string(s.state)).c_str(),
                                std::string(to_string(s.action)).c_str(),
                                std::string(to_string(s.wind)).c_str());
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace tunnelscout
