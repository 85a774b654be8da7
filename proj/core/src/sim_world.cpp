#include "tunnelscout/sim_world.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace tunnelscout {

std::string_view to_string(WindLevel level) {
  switch (level) {
    case WindLevel::None: return "None";
    case WindLevel::Low: return "Low";
    case WindLevel::Middle: return "Middle";
    case WindLevel::High: return "High";
  }
  return "?";
}

std::optional<WindLevel> parse_wind_level(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "none") return WindLevel::None;
  if (lower == "low") return WindLevel::Low;
  if (lower == "middle") return WindLevel::Middle;
  if (lower == "high") return WindLevel::High;
  return std::nullopt;
}

double hover_wind_speed(WindLevel level) {
  switch (level) {
    case WindLevel::None: return 0.0;
    case WindLevel::Low: return 2.30;
    case WindLevel::Middle: return 2.71;
    case WindLevel::High: return 3.24;
  }
  return 0.0;
}

double straight_wind_speed(WindLevel level) {
  switch (level) {
    case WindLevel::None: return 0.0;
    case WindLevel::Low: return 1.86;
    case WindLevel::Middle: return 2.36;
    case WindLevel::High: return 2.71;
  }
  return 0.0;
}

Vec3 relative_flow_accel(const Vec3& wind_velocity, const Vec3& drone_velocity, double gain,
                         double mass_kg) {
  const Vec3 rel = wind_velocity - drone_velocity;
  return gain * rel.norm() * rel / mass_kg;
}

Vec3 wind_accel(const WindProfile& profile, const Vec3& drone_velocity, double mass_kg) {
  return relative_flow_accel(profile.velocity(), drone_velocity, profile.gain, mass_kg);
}

ControlCommand controller_step(DroneState& s, const Vec3& target, double target_yaw, double dt,
                               const DynamicsParams& p, const Vec3& external_accel) {
  const Vec3 accel = p.kp * (target - s.position) - p.kd * s.velocity + external_accel;
  s.velocity += accel * dt;
  const double speed = s.velocity.norm();
  if (speed > p.v_max) s.velocity *= p.v_max / speed;
  s.position += s.velocity * dt;

  s.yaw_rate = std::clamp(p.yaw_gain * (target_yaw - s.yaw), -p.yaw_rate_max, p.yaw_rate_max);
  s.yaw += s.yaw_rate * dt;
  return ControlCommand::from(s.velocity);
}

Vec3 obstacle_pose(const ObstacleTrack& track, double t) {
  const Vec3 ab = track.endpoint_b - track.endpoint_a;
  const double len = ab.norm();
  double u = track.phase;
  if (len > 0.0 && track.speed > 0.0) u += track.speed * t / (2.0 * len);
  u -= std::floor(u);
  const double frac = u < 0.5 ? 2.0 * u : 2.0 - 2.0 * u;
  return track.endpoint_a + frac * ab;
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw ScenarioInvalid(what); };
  if (!(tunnel.length > 0.0)) fail("tunnel.length must be positive");
  if (!(tunnel.width > 0.0)) fail("tunnel.width must be positive");
  if (!(tunnel.height > 0.0)) fail("tunnel.height must be positive");
  if (!(tunnel.wall_thickness > 0.0)) fail("tunnel.wall_thickness must be positive");
  if ((tunnel.axis.normalized() - Vec3::UnitX()).norm() > 1e-9) fail("tunnel.axis must be +x");
  if (!(sim_dt > 0.0) || !(planner_period > 0.0)) fail("time steps must be positive");
  const double ratio = planner_period / sim_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0) {
    fail("sim_dt must divide planner_period");
  }
  if (!(timeout > 0.0)) fail("timeout must be positive");
  if (!(drone_radius > 0.0)) fail("drone_radius must be positive");
  if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0)) fail("fusion_weight must lie in [0, 1]");
  if (!(localization_noise >= 0.0)) fail("localization_noise must be non-negative");
  if (max_lookaround_retries < 1) fail("max_lookaround_retries must be at least 1");
  if (!(dynamics.kp > 0.0 && dynamics.kd >= 0.0 && dynamics.v_max > 0.0 && dynamics.mass_kg > 0.0)) {
    fail("dynamics parameters must be positive");
  }
  if (!(wind.speed >= 0.0) || !(wind.gain >= 0.0)) fail("wind speed and gain must be non-negative");
  if (wind.speed > 0.0 && !(wind.direction.norm() > 0.0)) fail("wind direction must be non-zero");
  for (const ObstacleTrack& o : obstacles) {
    if (!(o.radius > 0.0) || !(o.height > 0.0)) fail("obstacle radius and height must be positive");
    if (!(o.speed >= 0.0)) fail("obstacle speed must be non-negative");
  }
  try {
    camera.validate();
    rrt.validate();
    zigzag.validate();
    if (!(map.resolution > 0.0)) fail("map.resolution must be positive");
    const ThrustCheck tc = thrust_margin_check(drone);
    if (!tc.pass) fail("drone fails the thrust margin check");
  } catch (const ScenarioInvalid&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioInvalid(e.what());
  }
}

int Scenario::substeps() const { return static_cast<int>(std::lround(planner_period / sim_dt)); }

Scene static_scene(const TunnelSpec& t) {
  const double w = 0.5 * t.width;
  const double th = t.wall_thickness;
  const double x0 = -1.0;
  const double x1 = t.length + th;
  Scene s;
  s.boxes.push_back({Vec3(x0, -w - th, -th), Vec3(x1, w + th, 0.0)});             // floor
  s.boxes.push_back({Vec3(x0, -w - th, t.height), Vec3(x1, w + th, t.height + th)});  // ceiling
  s.boxes.push_back({Vec3(x0, -w - th, 0.0), Vec3(x1, -w, t.height)});            // right wall
  s.boxes.push_back({Vec3(x0, w, 0.0), Vec3(x1, w + th, t.height)});              // left wall
  s.boxes.push_back({Vec3(t.length, -w, 0.0), Vec3(x1, w, t.height)});            // dead end
  return s;
}

Scene scene_at(const Scenario& scenario, double t) {
  Scene s = static_scene(scenario.tunnel);
  for (const ObstacleTrack& o : scenario.obstacles) {
    s.cylinders.push_back({obstacle_pose(o, t), o.radius, o.height});
  }
  return s;
}

VoxelMap make_map(const Scenario& scenario) {
  const TunnelSpec& t = scenario.tunnel;
  const Vec3 lo(-1.0, -0.5 * t.width - 0.5, -0.5);
  const Vec3 hi(t.length + 1.0, 0.5 * t.width + 0.5, t.height + 0.5);
  return VoxelMap::covering(lo, hi, scenario.map);
}

Vec3 spawn_position(const Scenario&) { return {1.0, 0.0, 0.3}; }

bool check_collision(const Vec3& p, const Scene& scene, double r) {
  for (const Box& b : scene.boxes) {
    const Vec3 e = (b.lo - p).cwiseMax(p - b.hi).cwiseMax(0.0);
    if (e.norm() < r) return true;
  }
  for (const Cylinder& c : scene.cylinders) {
    const double horizontal = (p.head<2>() - c.base.head<2>()).norm();
    if (horizontal < r + c.radius && p.z() < c.base.z() + c.height + r) return true;
  }
  return false;
}

VoxelMap ground_truth_map(const Scenario& scenario, double t) {
  VoxelMap map = make_map(scenario);
  const Scene scene = scene_at(scenario, t);
  const VoxelMapParams& mp = map.params();
  const Index3 n = map.extent();
  for (int ix = 0; ix < n.x(); ++ix) {
    for (int iy = 0; iy < n.y(); ++iy) {
      for (int iz = 0; iz < n.z(); ++iz) {
        const Index3 idx(ix, iy, iz);
        const Vec3 c = map.center_of(idx);
        bool inside = false;
        for (const Box& b : scene.boxes) {
          if ((c.array() >= b.lo.array()).all() && (c.array() <= b.hi.array()).all()) inside = true;
        }
        for (const Cylinder& cy : scene.cylinders) {
          if ((c.head<2>() - cy.base.head<2>()).norm() <= cy.radius && c.z() >= cy.base.z() &&
              c.z() <= cy.base.z() + cy.height) {
            inside = true;
          }
        }
        map.set_log_odds(idx, inside ? mp.l_max : mp.l_min);
      }
    }
  }
  return map;
}

}  // namespace tunnelscout
