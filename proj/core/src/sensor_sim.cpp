#include "tunnelscout/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tunnelscout {

void Scene::validate() const {
  for (const Box& b : boxes) {
    if (!((b.hi - b.lo).array() > 0.0).all()) throw InvalidSpec("scene box has non-positive extent");
  }
  for (const Cylinder& c : cylinders) {
    if (!(c.radius > 0.0) || !(c.height > 0.0)) {
      throw InvalidSpec("scene cylinder has non-positive radius or height");
    }
  }
}

void DepthCamera::validate() const {
  if (!(h_fov_deg > 0.0 && h_fov_deg < 180.0)) throw InvalidSpec("h_fov must lie in (0, 180)");
  if (!(v_fov_deg > 0.0 && v_fov_deg < 180.0)) throw InvalidSpec("v_fov must lie in (0, 180)");
  if (!(max_range > 0.0)) throw InvalidSpec("max_range must be positive");
  if (rays_h < 2 || rays_v < 2) throw InvalidSpec("camera needs at least 2 rays per axis");
  if (!(noise_sigma >= 0.0)) throw InvalidSpec("noise_sigma must be non-negative");
}

std::vector<Vec3> DepthCamera::ray_directions() const {
  constexpr double kDeg = std::numbers::pi / 180.0;
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(rays_h) * static_cast<std::size_t>(rays_v));
  for (int j = 0; j < rays_v; ++j) {
    const double el = (-0.5 + static_cast<double>(j) / (rays_v - 1)) * v_fov_deg * kDeg;
    for (int i = 0; i < rays_h; ++i) {
      const double az = (-0.5 + static_cast<double>(i) / (rays_h - 1)) * h_fov_deg * kDeg;
      dirs.push_back(Vec3(1.0, std::tan(az), std::tan(el)).normalized());
    }
  }
  return dirs;
}

std::optional<double> ray_box(const Vec3& origin, const Vec3& dir, const Box& box) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (origin[i] < box.lo[i] || origin[i] > box.hi[i]) return std::nullopt;
      continue;
    }
    double t0 = (box.lo[i] - origin[i]) / dir[i];
    double t1 = (box.hi[i] - origin[i]) / dir[i];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near <= 0.0) return std::nullopt;
  return t_near;
}

std::optional<double> ray_cylinder(const Vec3& origin, const Vec3& dir, const Cylinder& cyl) {
  const double z0 = cyl.base.z();
  const double z1 = z0 + cyl.height;
  const double ox = origin.x() - cyl.base.x();
  const double oy = origin.y() - cyl.base.y();
  const double r2 = cyl.radius * cyl.radius;
  double best = std::numeric_limits<double>::infinity();

  const double a = dir.x() * dir.x() + dir.y() * dir.y();
  if (a > 0.0) {
    const double b = 2.0 * (ox * dir.x() + oy * dir.y());
    const double c = ox * ox + oy * oy - r2;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      const double z = origin.z() + t * dir.z();
      if (t > 0.0 && z >= z0 && z <= z1) best = t;
    }
  }
  if (dir.z() != 0.0) {
    for (double zc : {z0, z1}) {
      const double t = (zc - origin.z()) / dir.z();
      if (!(t > 0.0) || t >= best) continue;
      const double x = ox + t * dir.x();
      const double y = oy + t * dir.y();
      // Only the outward-facing cap can be an entry point.
      const bool from_outside = (zc == z0) ? origin.z() < z0 : origin.z() > z1;
      if (from_outside && x * x + y * y <= r2) best = t;
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::optional<double> raycast(const Scene& scene, const Vec3& origin, const Vec3& dir,
                              double max_range) {
  double best = std::numeric_limits<double>::infinity();
  for (const Box& b : scene.boxes) {
    if (auto t = ray_box(origin, dir, b); t && *t < best) best = *t;
  }
  for (const Cylinder& c : scene.cylinders) {
    if (auto t = ray_cylinder(origin, dir, c); t && *t < best) best = *t;
  }
  if (best > max_range) return std::nullopt;
  return best;
}

DepthScan render_depth_scan(const Scene& scene, const DepthCamera& camera, const Pose& pose,
                            std::mt19937_64* rng) {
  DepthScan scan;
  scan.sensor_pose = pose;
  scan.max_range = camera.max_range;
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const bool noisy = rng != nullptr && camera.noise_sigma > 0.0;
  std::normal_distribution<double> noise(0.0, camera.noise_sigma);
  const std::vector<Vec3> local = camera.ray_directions();
  scan.rays.reserve(local.size());
  for (const Vec3& d : local) {
    DepthRay ray;
    ray.direction = Vec3(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z());
    ray.hit_distance = raycast(scene, pose.position, ray.direction, camera.max_range);
    if (ray.hit_distance && noisy) {
      const double r = *ray.hit_distance + noise(*rng);
      if (r > camera.max_range) {
        ray.hit_distance.reset();
      } else {
        ray.hit_distance = std::max(r, 1e-3);
      }
    }
    scan.rays.push_back(ray);
  }
  return scan;
}

}  // namespace tunnelscout
