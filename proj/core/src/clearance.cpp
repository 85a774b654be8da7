#include "tunnelscout/clearance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tunnelscout {

namespace {
constexpr double kFar = 1e20;
}

void distance_transform_1d(const std::vector<double>& f, std::vector<double>& out) {
  const int n = static_cast<int>(f.size());
  out.assign(f.size(), kFar);
  if (n == 0) return;
  std::vector<int> v(f.size());
  std::vector<double> z(f.size() + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kFar) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {
      // Only when k == 0: the new parabola dominates the whole line.
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  if (k < 0) return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

CollisionChecker::CollisionChecker(const VoxelMap& map) : map_(&map) {
  const Index3& ex = map.extent();
  const std::size_t n = map.voxel_count();
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = map.blocked(map.unlinear(i)) ? 0.0 : kFar;
  }
  std::vector<double> line;
  std::vector<double> result;
  for (int axis = 0; axis < 3; ++axis) {
    const int len = ex[axis];
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    line.resize(static_cast<std::size_t>(len));
    Index3 idx;
    for (int i = 0; i < ex[a1]; ++i) {
      for (int j = 0; j < ex[a2]; ++j) {
        idx[a1] = i;
        idx[a2] = j;
        for (int t = 0; t < len; ++t) {
          idx[axis] = t;
          line[static_cast<std::size_t>(t)] = grid[map.linear(idx)];
        }
        distance_transform_1d(line, result);
        for (int t = 0; t < len; ++t) {
          idx[axis] = t;
          grid[map.linear(idx)] = result[static_cast<std::size_t>(t)];
        }
      }
    }
  }
  dist_sq_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist_sq_[i] = grid[i] >= kFar ? std::numeric_limits<float>::infinity()
                                  : static_cast<float>(grid[i]);
  }
}

double CollisionChecker::center_clearance(const Index3& idx) const {
  return std::sqrt(static_cast<double>(dist_sq_[map_->linear(idx)])) * map_->resolution();
}

bool CollisionChecker::segment_free(const Vec3& a, const Vec3& b, double inflate) const {
  if (!a.allFinite() || !b.allFinite()) return false;
  inflate = std::max(inflate, 0.0);
  const VoxelMap& map = *map_;
  const double res = map.resolution();
  const bool swap = std::lexicographical_compare(b.data(), b.data() + 3, a.data(), a.data() + 3);
  const Vec3& p = swap ? b : a;
  const Vec3& q = swap ? a : b;
  const double len = (q - p).norm();
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / res)));
  const double half_piece = 0.5 * len / pieces;
  const double slack = std::sqrt(3.0) * res + half_piece;
  for (int k = 0; k < pieces; ++k) {
    const Vec3 s = p + (q - p) * (static_cast<double>(k) / pieces);
    const Vec3 e = k + 1 == pieces ? q : Vec3(p + (q - p) * (static_cast<double>(k + 1) / pieces));
    const Vec3 mid = 0.5 * (s + e);
    const auto idx = map.index_of(mid);
    if (idx) {
      const double clear = center_clearance(*idx) - slack;
      const double border = border_distance(map, mid) - half_piece;
      if (clear > inflate && border > inflate) continue;
    }
    if (piece_blocked(map, s, e, inflate)) return false;
  }
  return true;
}

}  // namespace tunnelscout
