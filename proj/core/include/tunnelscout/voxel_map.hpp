#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tunnelscout/types.hpp"

namespace tunnelscout {

using Index3 = Eigen::Vector3i;

enum class OccupancyState : std::uint8_t { Free, Occupied, Unknown };

char state_letter(OccupancyState s);

struct VoxelMapParams {
  double resolution = 0.10;
  float hit = 0.85f;
  float miss = -0.40f;
  float l_min = -2.0f;
  float l_max = 3.5f;
  float occ_threshold = 0.0f;
  float free_threshold = -0.3f;
};

struct DepthRay {
  Vec3 direction = Vec3::UnitX();
  std::optional<double> hit_distance;  ///< nullopt means no return
};

struct DepthScan {
  Pose sensor_pose;
  double max_range = 3.0;
  std::vector<DepthRay> rays;
};

/// Dense log-odds occupancy grid. Voxel (i,j,k) spans
/// [origin + res*(i,j,k), origin + res*(i+1,j+1,k+1]).
class VoxelMap {
 public:
  VoxelMap(const Vec3& origin, const Index3& extent, VoxelMapParams params = {});

  /// Smallest grid covering [lo, hi].
  static VoxelMap covering(const Vec3& lo, const Vec3& hi, VoxelMapParams params = {});

  const Vec3& origin() const { return origin_; }
  double resolution() const { return params_.resolution; }
  const Index3& extent() const { return extent_; }
  const VoxelMapParams& params() const { return params_; }
  Vec3 upper_corner() const { return origin_ + extent_.cast<double>() * resolution(); }
  std::size_t voxel_count() const { return log_odds_.size(); }

  bool in_bounds(const Index3& idx) const {
    return (idx.array() >= 0).all() && (idx.array() < extent_.array()).all();
  }
  bool contains(const Vec3& p) const;
  std::optional<Index3> index_of(const Vec3& p) const;
  /// Floor of the grid coordinate, not clamped.
  Index3 raw_index(const Vec3& p) const;
  Vec3 center_of(const Index3& idx) const;

  std::size_t linear(const Index3& idx) const {
    return static_cast<std::size_t>(idx.x()) +
           static_cast<std::size_t>(extent_.x()) *
               (static_cast<std::size_t>(idx.y()) +
                static_cast<std::size_t>(extent_.y()) * static_cast<std::size_t>(idx.z()));
  }
  Index3 unlinear(std::size_t n) const;

  bool known(const Index3& idx) const { return known_[linear(idx)] != 0; }
  float log_odds(const Index3& idx) const { return log_odds_[linear(idx)]; }
  OccupancyState state(const Index3& idx) const;
  /// Outside the grid is Unknown.
  OccupancyState state_or_unknown(const Index3& idx) const;
  /// Blocked means Occupied, Unknown, or outside the grid.
  bool blocked(const Index3& idx) const {
    return state_or_unknown(idx) != OccupancyState::Free;
  }

  /// Adds delta to the voxel, clamps, marks it observed.
  void update(const Index3& idx, float delta);
  void set_log_odds(const Index3& idx, float value);
  void reset_voxel(const Index3& idx);

  /// Bumped on every mutation.
  std::uint64_t revision() const { return revision_; }

 private:
  Vec3 origin_;
  Index3 extent_;
  VoxelMapParams params_;
  std::vector<float> log_odds_;
  std::vector<std::uint8_t> known_;
  std::uint64_t revision_ = 0;

  friend void insert_scan(VoxelMap& map, const DepthScan& scan);
  std::vector<std::uint8_t> scratch_;
  std::vector<std::uint32_t> touched_;
};

/// Ray-cast log-odds update. Each voxel changes at most once per scan and a
/// hit wins over a pass-through. Throws OutOfBounds if the sensor is outside.
void insert_scan(VoxelMap& map, const DepthScan& scan);

OccupancyState query(const VoxelMap& map, const Vec3& point);

/// Visits every voxel whose interior the segment a->b crosses, in order.
/// Stops early if the visitor returns false.
template <typename Visitor>
void traverse_voxels(const VoxelMap& map, const Vec3& a, const Vec3& b, Visitor&& visit);

/// Squared distance between segment a->b and the box [lo, hi].
double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi);

/// Distance from p to the region outside the grid (0 if p is outside).
double border_distance(const VoxelMap& map, const Vec3& p);

/// True iff no point of the segment lies within `inflate` of an Occupied,
/// Unknown or out-of-grid voxel. Symmetric in a and b.
bool segment_collision_check(const VoxelMap& map, const Vec3& a, const Vec3& b, double inflate);

/// Local test on a short piece; the caller guarantees the piece is short
/// relative to the resolution. Exposed for the distance-field checker.
bool piece_blocked(const VoxelMap& map, const Vec3& a, const Vec3& b, double inflate);

/// Lines "ix iy iz S value" for each non-Unknown voxel, index-sorted.
std::string export_text(const VoxelMap& map);

/// Loads an export into `map` (geometry must match). Returns voxel count.
/// Throws ParseError with the offending line number.
std::size_t parse_text(const std::string& text, VoxelMap& map);

/// Marks Unknown voxels whose centers lie within radius of p as Free.
void clear_unknown_sphere(VoxelMap& map, const Vec3& p, double radius);

// ---------------------------------------------------------------------------

template <typename Visitor>
void traverse_voxels(const VoxelMap& map, const Vec3& a, const Vec3& b, Visitor&& visit) {
  const double res = map.resolution();
  const Vec3 ga = (a - map.origin()) / res;
  const Vec3 gb = (b - map.origin()) / res;
  const Vec3 d = gb - ga;
  Index3 cell(static_cast<int>(std::floor(ga.x())), static_cast<int>(std::floor(ga.y())),
              static_cast<int>(std::floor(ga.z())));
  const Index3 last(static_cast<int>(std::floor(gb.x())), static_cast<int>(std::floor(gb.y())),
                    static_cast<int>(std::floor(gb.z())));
  Index3 step;
  Vec3 t_max, t_delta;
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 0) {
      step[i] = 1;
      t_delta[i] = 1.0 / d[i];
      t_max[i] = (cell[i] + 1 - ga[i]) / d[i];
    } else if (d[i] < 0) {
      step[i] = -1;
      t_delta[i] = -1.0 / d[i];
      t_max[i] = (cell[i] - ga[i]) / d[i];
    } else {
      step[i] = 0;
      t_delta[i] = std::numeric_limits<double>::infinity();
      t_max[i] = std::numeric_limits<double>::infinity();
    }
  }
  const int max_steps = std::abs(last.x() - cell.x()) + std::abs(last.y() - cell.y()) +
                        std::abs(last.z() - cell.z()) + 1;
  for (int n = 0; n < max_steps; ++n) {
    if (!visit(cell)) return;
    if (cell == last) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) return;
    cell[axis] += step[axis];
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace tunnelscout
