#include "tunnelscout/voxel_map.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace tunnelscout {

namespace {

constexpr std::uint8_t kMarkFree = 1;
constexpr std::uint8_t kMarkHit = 2;

double point_box_distance_sq(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
    s += e * e;
  }
  return s;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

}  // namespace

char state_letter(OccupancyState s) {
  switch (s) {
    case OccupancyState::Free: return 'F';
    case OccupancyState::Occupied: return 'O';
    case OccupancyState::Unknown: return 'U';
  }
  return '?';
}

VoxelMap::VoxelMap(const Vec3& origin, const Index3& extent, VoxelMapParams params)
    : origin_(origin), extent_(extent), params_(params) {
  if (!(params_.resolution > 0.0)) throw InvalidSpec("voxel resolution must be positive");
  if ((extent_.array() <= 0).any()) throw InvalidSpec("voxel extent must be positive");
  if (!(params_.l_min < params_.l_max)) throw InvalidSpec("log-odds clamp range is empty");
  const auto n = static_cast<std::size_t>(extent_.x()) * static_cast<std::size_t>(extent_.y()) *
                 static_cast<std::size_t>(extent_.z());
  log_odds_.assign(n, 0.0f);
  known_.assign(n, 0);
  scratch_.assign(n, 0);
}

VoxelMap VoxelMap::covering(const Vec3& lo, const Vec3& hi, VoxelMapParams params) {
  const Vec3 size = (hi - lo) / params.resolution;
  Index3 extent;
  for (int i = 0; i < 3; ++i) {
    extent[i] = std::max(1, static_cast<int>(std::ceil(size[i] - 1e-9)));
  }
  return VoxelMap(lo, extent, params);
}

bool VoxelMap::contains(const Vec3& p) const {
  const Vec3 hi = upper_corner();
  return (p.array() >= origin_.array()).all() && (p.array() < hi.array()).all();
}

Index3 VoxelMap::raw_index(const Vec3& p) const {
  const Vec3 g = (p - origin_) / params_.resolution;
  return {static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
          static_cast<int>(std::floor(g.z()))};
}

std::optional<Index3> VoxelMap::index_of(const Vec3& p) const {
  if (!p.allFinite()) return std::nullopt;
  const Index3 idx = raw_index(p);
  if (!in_bounds(idx)) return std::nullopt;
  return idx;
}

Vec3 VoxelMap::center_of(const Index3& idx) const {
  return origin_ + (idx.cast<double>().array() + 0.5).matrix() * params_.resolution;
}

Index3 VoxelMap::unlinear(std::size_t n) const {
  const auto ex = static_cast<std::size_t>(extent_.x());
  const auto ey = static_cast<std::size_t>(extent_.y());
  return {static_cast<int>(n % ex), static_cast<int>((n / ex) % ey),
          static_cast<int>(n / (ex * ey))};
}

OccupancyState VoxelMap::state(const Index3& idx) const {
  const std::size_t n = linear(idx);
  if (!known_[n]) return OccupancyState::Unknown;
  const float v = log_odds_[n];
  if (v >= params_.occ_threshold) return OccupancyState::Occupied;
  if (v <= params_.free_threshold) return OccupancyState::Free;
  return OccupancyState::Unknown;
}

OccupancyState VoxelMap::state_or_unknown(const Index3& idx) const {
  return in_bounds(idx) ? state(idx) : OccupancyState::Unknown;
}

void VoxelMap::update(const Index3& idx, float delta) {
  const std::size_t n = linear(idx);
  log_odds_[n] = std::clamp(log_odds_[n] + delta, params_.l_min, params_.l_max);
  known_[n] = 1;
  ++revision_;
}

void VoxelMap::set_log_odds(const Index3& idx, float value) {
  const std::size_t n = linear(idx);
  log_odds_[n] = std::clamp(value, params_.l_min, params_.l_max);
  known_[n] = 1;
  ++revision_;
}

void VoxelMap::reset_voxel(const Index3& idx) {
  const std::size_t n = linear(idx);
  log_odds_[n] = 0.0f;
  known_[n] = 0;
  ++revision_;
}

void insert_scan(VoxelMap& map, const DepthScan& scan) {
  const Vec3 origin = scan.sensor_pose.position;
  if (!map.index_of(origin)) {
    throw OutOfBounds("sensor position lies outside the voxel grid");
  }
  if (scan.rays.empty()) return;

  const double eps = 1e-3 * map.resolution();
  auto mark = [&map](const Index3& idx, std::uint8_t m) {
    const std::size_t n = map.linear(idx);
    std::uint8_t& cell = map.scratch_[n];
    if (cell == 0) map.touched_.push_back(static_cast<std::uint32_t>(n));
    cell = std::max(cell, m);
  };

  for (const DepthRay& ray : scan.rays) {
    const Vec3 dir = ray.direction.normalized();
    const bool has_hit = ray.hit_distance.has_value() && *ray.hit_distance <= scan.max_range;
    const double reach = has_hit ? *ray.hit_distance : scan.max_range;
    const Vec3 end = origin + dir * (has_hit ? reach + eps : reach);
    const std::optional<Index3> hit_idx = has_hit ? map.index_of(end) : std::nullopt;
    traverse_voxels(map, origin, end, [&](const Index3& idx) {
      if (!map.in_bounds(idx)) return false;
      if (hit_idx && idx == *hit_idx) return false;
      mark(idx, kMarkFree);
      return true;
    });
    if (hit_idx) mark(*hit_idx, kMarkHit);
  }

  const VoxelMapParams& p = map.params();
  for (std::uint32_t n : map.touched_) {
    const Index3 idx = map.unlinear(n);
    map.update(idx, map.scratch_[n] == kMarkHit ? p.hit : p.miss);
    map.scratch_[n] = 0;
  }
  map.touched_.clear();
}

OccupancyState query(const VoxelMap& map, const Vec3& point) {
  const auto idx = map.index_of(point);
  return idx ? map.state(*idx) : OccupancyState::Unknown;
}

double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi) {
  // Piecewise quadratic in t; breakpoints where a coordinate crosses a slab face.
  const Vec3 d = b - a;
  std::array<double, 8> ts{};
  std::size_t nt = 0;
  ts[nt++] = 0.0;
  ts[nt++] = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) continue;
    for (double face : {lo[i], hi[i]}) {
      const double t = (face - a[i]) / d[i];
      if (t > 0.0 && t < 1.0) ts[nt++] = t;
    }
  }
  std::sort(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(nt));
  auto f = [&](double t) { return point_box_distance_sq(a + t * d, lo, hi); };
  double best = std::min(f(0.0), f(1.0));
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const double t0 = ts[k];
    const double t1 = ts[k + 1];
    if (t1 <= t0) continue;
    const Vec3 mid = a + 0.5 * (t0 + t1) * d;
    double qa = 0.0;
    double qb = 0.0;
    for (int i = 0; i < 3; ++i) {
      double ref;
      if (mid[i] < lo[i]) {
        ref = lo[i];
      } else if (mid[i] > hi[i]) {
        ref = hi[i];
      } else {
        continue;
      }
      // (a_i + t d_i - ref)^2
      qa += d[i] * d[i];
      qb += 2.0 * d[i] * (a[i] - ref);
    }
    if (qa > 0.0) {
      const double t = std::clamp(-qb / (2.0 * qa), t0, t1);
      best = std::min(best, f(t));
    }
    best = std::min(best, f(t1));
  }
  return best;
}

double border_distance(const VoxelMap& map, const Vec3& p) {
  if (!map.contains(p)) return 0.0;
  const Vec3 lo = p - map.origin();
  const Vec3 hi = map.upper_corner() - p;
  return std::min(lo.minCoeff(), hi.minCoeff());
}

bool piece_blocked(const VoxelMap& map, const Vec3& a, const Vec3& b, double inflate) {
  const double res = map.resolution();
  const Vec3 lo = a.cwiseMin(b).array() - inflate;
  const Vec3 hi = a.cwiseMax(b).array() + inflate;
  const Index3 i0 = map.raw_index(lo);
  const Index3 i1 = map.raw_index(hi);
  const double limit = inflate * inflate;
  Index3 idx;
  for (idx.z() = i0.z(); idx.z() <= i1.z(); ++idx.z()) {
    for (idx.y() = i0.y(); idx.y() <= i1.y(); ++idx.y()) {
      for (idx.x() = i0.x(); idx.x() <= i1.x(); ++idx.x()) {
        if (!map.blocked(idx)) continue;
        const Vec3 box_lo = map.origin() + idx.cast<double>() * res;
        const Vec3 box_hi = box_lo.array() + res;
        if (segment_box_distance_sq(a, b, box_lo, box_hi) <= limit) return true;
      }
    }
  }
  return false;
}

bool segment_collision_check(const VoxelMap& map, const Vec3& a, const Vec3& b, double inflate) {
  if (!a.allFinite() || !b.allFinite()) return false;
  inflate = std::max(inflate, 0.0);
  const Vec3& p = lex_less(b, a) ? b : a;
  const Vec3& q = lex_less(b, a) ? a : b;
  const double len = (q - p).norm();
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / map.resolution())));
  for (int k = 0; k < pieces; ++k) {
    const Vec3 s = p + (q - p) * (static_cast<double>(k) / pieces);
    const Vec3 e = k + 1 == pieces ? q : Vec3(p + (q - p) * (static_cast<double>(k + 1) / pieces));
    if (piece_blocked(map, s, e, inflate)) return false;
  }
  return true;
}

std::string export_text(const VoxelMap& map) {
  std::string out;
  char line[96];
  const Index3& ex = map.extent();
  Index3 idx;
  for (idx.x() = 0; idx.x() < ex.x(); ++idx.x()) {
    for (idx.y() = 0; idx.y() < ex.y(); ++idx.y()) {
      for (idx.z() = 0; idx.z() < ex.z(); ++idx.z()) {
        const OccupancyState s = map.state(idx);
        if (s == OccupancyState::Unknown) continue;
        const int len = std::snprintf(line, sizeof(line), "%d %d %d %c %.3f\n", idx.x(), idx.y(),
                                      idx.z(), state_letter(s), static_cast<double>(map.log_odds(idx)));
        out.append(line, static_cast<std::size_t>(len));
      }
    }
  }
  return out;
}

std::size_t parse_text(const std::string& text, VoxelMap& map) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::size_t count = 0;
  const VoxelMapParams& p = map.params();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Index3 idx;
    char letter = 0;
    double value = 0.0;
    if (!(ls >> idx.x() >> idx.y() >> idx.z() >> letter >> value)) {
      throw ParseError("malformed voxel line", "voxel", line_no);
    }
    std::string rest;
    if (ls >> rest) throw ParseError("trailing data on voxel line", "voxel", line_no);
    if (!map.in_bounds(idx)) throw ParseError("voxel index outside grid", "index", line_no);
    auto v = static_cast<float>(value);
    if (letter == 'O') {
      v = std::max(v, p.occ_threshold);
    } else if (letter == 'F') {
      v = std::min(v, p.free_threshold);
    } else {
      throw ParseError(std::string("unknown state letter '") + letter + "'", "state", line_no);
    }
    map.set_log_odds(idx, v);
    ++count;
  }
  return count;
}

void clear_unknown_sphere(VoxelMap& map, const Vec3& p, double radius) {
  const Index3 i0 = map.raw_index(p.array() - radius);
  const Index3 i1 = map.raw_index(p.array() + radius);
  const double r2 = radius * radius;
  Index3 idx;
  for (idx.z() = std::max(0, i0.z()); idx.z() <= std::min(map.extent().z() - 1, i1.z()); ++idx.z()) {
    for (idx.y() = std::max(0, i0.y()); idx.y() <= std::min(map.extent().y() - 1, i1.y()); ++idx.y()) {
      for (idx.x() = std::max(0, i0.x()); idx.x() <= std::min(map.extent().x() - 1, i1.x());
           ++idx.x()) {
        if (map.state(idx) != OccupancyState::Unknown) continue;
        if ((map.center_of(idx) - p).squaredNorm() > r2) continue;
        map.set_log_odds(idx, std::min(map.log_odds(idx), map.params().free_threshold));
      }
    }
  }
}

}  // namespace tunnelscout
