#include "tunnelscout/rrt_planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>

namespace tunnelscout {

namespace {

constexpr std::uint64_t kPairStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSegmentStream = 0xc2b2ae3d27d4eb4fULL;

struct Node {
  Vec3 p;
  int parent;
};

}  // namespace

void RrtConfig::validate() const {
  if (!(step_size > 0.0)) throw InvalidSpec("rrt step_size must be positive");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw InvalidSpec("rrt goal_bias must lie in [0, 1]");
  if (max_samples < 1) throw InvalidSpec("rrt max_samples must be at least 1");
  if (!(goal_tolerance >= 0.0)) throw InvalidSpec("rrt goal_tolerance must be non-negative");
  if (!(inflate >= 0.0)) throw InvalidSpec("rrt inflate must be non-negative");
  if (shortcut_iters < 0 || segment_shortcut_iters < 0) {
    throw InvalidSpec("shortcut iteration budgets must be non-negative");
  }
}

Path plan_rrt(const CollisionChecker& checker, const Vec3& start, const Vec3& goal,
              const RrtConfig& cfg) {
  cfg.validate();
  if (!checker.point_free(start, cfg.inflate)) {
    throw StartInCollision("rrt start is not collision-free");
  }
  Path path;
  if ((goal - start).norm() <= cfg.goal_tolerance) {
    path.waypoints.push_back(start);
    return path;
  }

  const VoxelMap& map = checker.map();
  const Vec3 lo = map.origin();
  const Vec3 span = map.upper_corner() - lo;
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Node> tree;
  tree.reserve(1024);
  tree.push_back({start, -1});

  for (int sample = 0; sample < cfg.max_samples; ++sample) {
    Vec3 target;
    if (unit(rng) < cfg.goal_bias) {
      target = goal;
    } else {
      target = lo + Vec3(unit(rng) * span.x(), unit(rng) * span.y(), unit(rng) * span.z());
    }

    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      const double d = (tree[static_cast<std::size_t>(i)].p - target).squaredNorm();
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    const Vec3 from = tree[static_cast<std::size_t>(nearest)].p;
    const Vec3 delta = target - from;
    const double dist = delta.norm();
    if (dist <= 1e-12) continue;
    const Vec3 to = dist <= cfg.step_size ? target : Vec3(from + delta * (cfg.step_size / dist));
    if (!checker.segment_free(from, to, cfg.inflate)) continue;
    tree.push_back({to, nearest});

    if ((goal - to).norm() <= cfg.goal_tolerance) {
      int tip = static_cast<int>(tree.size()) - 1;
      if (to != goal && checker.segment_free(to, goal, cfg.inflate)) {
        tree.push_back({goal, tip});
        tip = static_cast<int>(tree.size()) - 1;
      }
      for (int i = tip; i >= 0; i = tree[static_cast<std::size_t>(i)].parent) {
        path.waypoints.push_back(tree[static_cast<std::size_t>(i)].p);
      }
      std::reverse(path.waypoints.begin(), path.waypoints.end());
      remove_consecutive_duplicates(path);
      return path;
    }
  }
  throw NoPathFound("rrt exhausted its sample budget");
}

Path plan_rrt(const VoxelMap& map, const Vec3& start, const Vec3& goal, const RrtConfig& cfg) {
  const CollisionChecker checker(map);
  return plan_rrt(checker, start, goal, cfg);
}

Path shortcut_pairs(const Path& path, const CollisionChecker& checker, const RrtConfig& cfg,
                    ShortcutStats* stats) {
  ShortcutStats local;
  Path out = path;
  out.yaw.clear();
  if (out.size() >= 3) {
    std::mt19937_64 rng(cfg.rng_seed ^ kPairStream);
    for (int it = 0; it < cfg.shortcut_iters; ++it) {
      ++local.attempts;
      const int n = static_cast<int>(out.size());
      if (n < 3) continue;
      std::uniform_int_distribution<int> pick(0, n - 1);
      int i = 0;
      int j = 0;
      do {
        i = pick(rng);
        j = pick(rng);
      } while (std::abs(i - j) < 2);
      if (i > j) std::swap(i, j);
      if (!checker.segment_free(out.waypoints[static_cast<std::size_t>(i)],
                                out.waypoints[static_cast<std::size_t>(j)], cfg.inflate)) {
        continue;
      }
      out.waypoints.erase(out.waypoints.begin() + i + 1, out.waypoints.begin() + j);
      ++local.accepted;
    }
  }
  if (stats) *stats = local;
  return out;
}

Path shortcut_pairs(const Path& path, const VoxelMap& map, const RrtConfig& cfg,
                    ShortcutStats* stats) {
  const CollisionChecker checker(map);
  return shortcut_pairs(path, checker, cfg, stats);
}

Path shortcut_segment_points(const Path& path, const CollisionChecker& checker,
                             const RrtConfig& cfg, ShortcutStats* stats) {
  ShortcutStats local;
  Path out = path;
  out.yaw.clear();
  if (out.size() >= 3) {
    std::mt19937_64 rng(cfg.rng_seed ^ kSegmentStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> cum;
    for (int it = 0; it < cfg.segment_shortcut_iters; ++it) {
      ++local.attempts;
      const std::size_t n = out.size();
      if (n < 3) continue;
      cum.assign(n, 0.0);
      for (std::size_t k = 1; k < n; ++k) {
        cum[k] = cum[k - 1] + (out.waypoints[k] - out.waypoints[k - 1]).norm();
      }
      const double total = cum.back();
      double s1 = unit(rng) * total;
      double s2 = unit(rng) * total;
      if (s1 > s2) std::swap(s1, s2);
      auto segment_of = [&](double s) {
        const auto it_seg = std::upper_bound(cum.begin(), cum.end(), s);
        std::size_t k = static_cast<std::size_t>(it_seg - cum.begin());
        return std::min(std::max<std::size_t>(k, 1), n - 1) - 1;
      };
      const std::size_t i = segment_of(s1);
      const std::size_t j = segment_of(s2);
      if (i >= j) continue;
      auto point_at = [&](std::size_t seg, double s) -> Vec3 {
        const double len = cum[seg + 1] - cum[seg];
        const double f = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
        return out.waypoints[seg] + f * (out.waypoints[seg + 1] - out.waypoints[seg]);
      };
      const Vec3 p1 = point_at(i, s1);
      const Vec3 p2 = point_at(j, s2);
      if (!checker.segment_free(p1, p2, cfg.inflate)) continue;

      Path next;
      next.waypoints.assign(out.waypoints.begin(), out.waypoints.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      next.waypoints.push_back(p1);
      next.waypoints.push_back(p2);
      next.waypoints.insert(next.waypoints.end(),
                            out.waypoints.begin() + static_cast<std::ptrdiff_t>(j) + 1,
                            out.waypoints.end());
      remove_consecutive_duplicates(next);
      if (path_length(next) > total) continue;
      out = std::move(next);
      ++local.accepted;
    }
  }
  if (stats) *stats = local;
  return out;
}

Path shortcut_segment_points(const Path& path, const VoxelMap& map, const RrtConfig& cfg,
                             ShortcutStats* stats) {
  const CollisionChecker checker(map);
  return shortcut_segment_points(path, checker, cfg, stats);
}

Path plan_smoothed(const CollisionChecker& checker, const Vec3& start, const Vec3& goal,
                   const RrtConfig& cfg) {
  Path raw = plan_rrt(checker, start, goal, cfg);
  Path pass1 = shortcut_pairs(raw, checker, cfg);
  return shortcut_segment_points(pass1, checker, cfg);
}

}  // namespace tunnelscout
