#pragma once

#include <vector>

#include "tunnelscout/voxel_map.hpp"

namespace tunnelscout {

/// Segment checker backed by a Euclidean distance transform of the blocked
/// voxels. Answers exactly as segment_collision_check; pieces that are far
/// from anything blocked skip the local box tests.
class CollisionChecker {
 public:
  explicit CollisionChecker(const VoxelMap& map);

  const VoxelMap& map() const { return *map_; }

  /// Distance in meters from the center of idx to the nearest blocked
  /// voxel center inside the grid. Infinity when nothing is blocked.
  double center_clearance(const Index3& idx) const;

  bool segment_free(const Vec3& a, const Vec3& b, double inflate) const;
  bool point_free(const Vec3& p, double inflate) const { return segment_free(p, p, inflate); }

 private:
  const VoxelMap* map_;
  std::vector<float> dist_sq_;  // voxel units squared
};

/// Squared-distance transform along one line (lower envelope of parabolas).
/// f holds 0 at sites and a large value elsewhere; result written to out.
void distance_transform_1d(const std::vector<double>& f, std::vector<double>& out);

}  // namespace tunnelscout
