#pragma once

#include <vector>

#include "tunnelscout/types.hpp"

namespace tunnelscout {

/// Ordered waypoints. `yaw` is either empty or one heading per waypoint.
struct Path {
  std::vector<Vec3> waypoints;
  std::vector<double> yaw;

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
  const Vec3& front() const { return waypoints.front(); }
  const Vec3& back() const { return waypoints.back(); }
};

double path_length(const Path& path);

/// Drops waypoints equal to their predecessor (and their yaw entries).
void remove_consecutive_duplicates(Path& path);

}  // namespace tunnelscout
