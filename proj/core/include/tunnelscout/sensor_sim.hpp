#pragma once

#include <optional>
#include <random>
#include <vector>

#include "tunnelscout/types.hpp"
#include "tunnelscout/voxel_map.hpp"

namespace tunnelscout {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// Vertical cylinder standing on base.z, axis along +z.
struct Cylinder {
  Vec3 base = Vec3::Zero();
  double radius = 0.3;
  double height = 1.8;
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;

  /// Throws InvalidSpec on non-positive extents.
  void validate() const;
};

struct DepthCamera {
  double h_fov_deg = 70.0;
  double v_fov_deg = 55.0;
  double max_range = 3.0;
  int rays_h = 71;
  int rays_v = 56;
  double noise_sigma = 0.0;

  void validate() const;
  /// Unit ray directions in the camera frame (boresight +x, left +y, up +z).
  std::vector<Vec3> ray_directions() const;
};

std::optional<double> ray_box(const Vec3& origin, const Vec3& dir, const Box& box);
std::optional<double> ray_cylinder(const Vec3& origin, const Vec3& dir, const Cylinder& cyl);

/// Nearest hit along a unit direction, if within max_range.
std::optional<double> raycast(const Scene& scene, const Vec3& origin, const Vec3& dir,
                              double max_range);

/// Boresight follows the pose yaw with zero pitch. Noise is applied only
/// when camera.noise_sigma > 0 and an rng is supplied.
DepthScan render_depth_scan(const Scene& scene, const DepthCamera& camera, const Pose& pose,
                            std::mt19937_64* rng = nullptr);

}  // namespace tunnelscout
