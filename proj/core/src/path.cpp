#include "tunnelscout/path.hpp"

namespace tunnelscout {

double path_length(const Path& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    total += (path.waypoints[i] - path.waypoints[i - 1]).norm();
  }
  return total;
}

void remove_consecutive_duplicates(Path& path) {
  if (path.waypoints.size() < 2) return;
  const bool with_yaw = path.yaw.size() == path.waypoints.size();
  std::size_t out = 1;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    if (path.waypoints[i] == path.waypoints[out - 1]) continue;
    path.waypoints[out] = path.waypoints[i];
    if (with_yaw) path.yaw[out] = path.yaw[i];
    ++out;
  }
  path.waypoints.resize(out);
  if (with_yaw) path.yaw.resize(out);
}

}  // namespace tunnelscout
