#pragma once

#include <cstdint>

#include "tunnelscout/clearance.hpp"
#include "tunnelscout/path.hpp"
#include "tunnelscout/voxel_map.hpp"

namespace tunnelscout {

struct RrtConfig {
  double step_size = 0.5;
  double goal_bias = 0.1;
  int max_samples = 20000;
  double goal_tolerance = 0.3;
  double inflate = 0.25;
  int shortcut_iters = 1000;
  int segment_shortcut_iters = 1000;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct ShortcutStats {
  int attempts = 0;
  int accepted = 0;
};

/// Plain RRT from start toward goal. Every segment of the result passes the
/// collision check. Throws StartInCollision or NoPathFound.
Path plan_rrt(const CollisionChecker& checker, const Vec3& start, const Vec3& goal,
              const RrtConfig& cfg);
Path plan_rrt(const VoxelMap& map, const Vec3& start, const Vec3& goal, const RrtConfig& cfg);

/// Random waypoint-pair shortcutting. Runs exactly cfg.shortcut_iters
/// attempts when the input has an interior waypoint, none otherwise.
Path shortcut_pairs(const Path& path, const CollisionChecker& checker, const RrtConfig& cfg,
                    ShortcutStats* stats = nullptr);
Path shortcut_pairs(const Path& path, const VoxelMap& map, const RrtConfig& cfg,
                    ShortcutStats* stats = nullptr);

/// Random shortcutting between points sampled on segment interiors.
Path shortcut_segment_points(const Path& path, const CollisionChecker& checker,
                             const RrtConfig& cfg, ShortcutStats* stats = nullptr);
Path shortcut_segment_points(const Path& path, const VoxelMap& map, const RrtConfig& cfg,
                             ShortcutStats* stats = nullptr);

/// plan_rrt followed by both shortcut passes.
Path plan_smoothed(const CollisionChecker& checker, const Vec3& start, const Vec3& goal,
                   const RrtConfig& cfg);

}  // namespace tunnelscout
