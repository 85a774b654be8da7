#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tunnelscout/clearance.hpp"
#include "tunnelscout/rrt_planner.hpp"

using namespace tunnelscout;

namespace {

constexpr double kOracleSpacing = 0.1 / 20.0;

VoxelMap open_box() { return oracle::free_world(Vec3::Zero(), Index3(40, 30, 20), 0.1); }

/// Free box with a wall across x = 2 that leaves a gap near y = 2.5.
VoxelMap wall_with_gap() {
  VoxelMap m = open_box();
  for (int y = 0; y < 30; ++y) {
    if (y >= 22 && y <= 27) continue;
    for (int z = 0; z < 20; ++z) m.set_log_odds(Index3(20, y, z), m.params().l_max);
  }
  return m;
}

void expect_valid(const VoxelMap& m, const Path& p, const Vec3& s, const Vec3& g, double inflate) {
  ASSERT_GE(p.size(), 1u);
  EXPECT_EQ(p.front(), s);
  EXPECT_LE((p.back() - g).norm(), RrtConfig{}.goal_tolerance + 1e-12);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    EXPECT_TRUE(segment_collision_check(m, p.waypoints[i], p.waypoints[i + 1], inflate));
  }
  EXPECT_TRUE(oracle::dense_path_free(m, p, inflate, kOracleSpacing));
}

}  // namespace

TEST(RrtConfig, ValidateRejectsBadValues) {
  RrtConfig c;
  c.step_size = 0.0;
  EXPECT_THROW(c.validate(), InvalidSpec);
  c = RrtConfig{};
  c.goal_bias = 1.5;
  EXPECT_THROW(c.validate(), InvalidSpec);
  c = RrtConfig{};
  c.max_samples = 0;
  EXPECT_THROW(c.validate(), InvalidSpec);
}

TEST(PlanRrt, StartInCollisionThrows) {
  const VoxelMap m = wall_with_gap();
  RrtConfig cfg;
  cfg.inflate = 0.2;
  EXPECT_THROW(plan_rrt(m, Vec3(2.05, 0.5, 1.0), Vec3(3.5, 0.5, 1.0), cfg), StartInCollision);
}

TEST(PlanRrt, StartAtGoalIsSingleWaypoint) {
  const VoxelMap m = open_box();
  RrtConfig cfg;
  cfg.inflate = 0.2;
  const Path p = plan_rrt(m, Vec3(1, 1, 1), Vec3(1.1, 1, 1), cfg);
  ASSERT_EQ(p.size(), 1u);
}

TEST(PlanRrt, ThroughGapIsCollisionFree) {
  const VoxelMap m = wall_with_gap();
  RrtConfig cfg;
  cfg.inflate = 0.15;
  const Vec3 s(0.5, 0.5, 1.0), g(3.5, 0.5, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.rng_seed = seed;
    const Path p = plan_rrt(m, s, g, cfg);
    expect_valid(m, p, s, g, cfg.inflate);
  }
}

TEST(PlanRrt, EnclosedGoalExhaustsBudget) {
  VoxelMap m = open_box();
  for (int x = 28; x <= 36; ++x) {
    for (int y = 8; y <= 16; ++y) {
      for (int z = 2; z <= 12; ++z) {
        const bool shell = x == 28 || x == 36 || y == 8 || y == 16 || z == 2 || z == 12;
        if (shell) m.set_log_odds(Index3(x, y, z), m.params().l_max);
      }
    }
  }
  RrtConfig cfg;
  cfg.inflate = 0.1;
  cfg.max_samples = 2000;
  EXPECT_THROW(plan_rrt(m, Vec3(0.5, 0.5, 0.5), Vec3(3.25, 1.25, 0.75), cfg), NoPathFound);
}

TEST(PlanRrt, DeterministicPerSeed) {
  const VoxelMap m = wall_with_gap();
  RrtConfig cfg;
  cfg.inflate = 0.15;
  cfg.rng_seed = 99;
  const Path a = plan_smoothed(CollisionChecker(m), Vec3(0.5, 0.5, 1.0), Vec3(3.5, 0.5, 1.0), cfg);
  const Path b = plan_smoothed(CollisionChecker(m), Vec3(0.5, 0.5, 1.0), Vec3(3.5, 0.5, 1.0), cfg);
  EXPECT_EQ(a.waypoints, b.waypoints);
}

TEST(PlanRrt, SucceedsWhereBfsFindsPath) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.15, 1.85);
  int solvable = 0, solved = 0;
  for (int world = 0; world < 400 && solvable < 20; ++world) {
    const VoxelMap m = oracle::random_world(rng, 20, 0.1, 0.08);
    const Vec3 s(u(rng), u(rng), u(rng)), g(u(rng), u(rng), u(rng));
    RrtConfig cfg;
    cfg.inflate = 0.05;
    cfg.step_size = 0.2;
    cfg.rng_seed = static_cast<std::uint64_t>(world + 1);
    if (oracle::point_blocked(m, s, cfg.inflate) || oracle::point_blocked(m, g, cfg.inflate)) continue;
    if (!oracle::bfs_path_exists(m, s, g, cfg.inflate)) continue;
    ++solvable;
    try {
      const Path p = plan_rrt(m, s, g, cfg);
      ++solved;
      expect_valid(m, p, s, g, cfg.inflate);
    } catch (const NoPathFound&) {
    }
  }
  EXPECT_EQ(solvable, 20);
  EXPECT_GE(solved * 100, solvable * 95);
}

TEST(ShortcutPairs, ExactlyConfiguredAttempts) {
  const VoxelMap m = wall_with_gap();
  RrtConfig cfg;
  cfg.inflate = 0.15;
  const Path raw = plan_rrt(m, Vec3(0.5, 0.5, 1.0), Vec3(3.5, 0.5, 1.0), cfg);
  ASSERT_GE(raw.size(), 3u);
  ShortcutStats stats;
  shortcut_pairs(raw, m, cfg, &stats);
  EXPECT_EQ(stats.attempts, 1000);
  EXPECT_LE(stats.accepted, stats.attempts);

  Path two;
  two.waypoints = {Vec3(0.5, 0.5, 1.0), Vec3(1.0, 0.5, 1.0)};
  ShortcutStats none;
  shortcut_pairs(two, m, cfg, &none);
  EXPECT_EQ(none.attempts, 0);
}

TEST(Shortcut, NeverLongerAndStaysFree) {
  const VoxelMap m = wall_with_gap();
  RrtConfig cfg;
  cfg.inflate = 0.15;
  const Vec3 s(0.5, 0.5, 1.0), g(3.5, 0.5, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.rng_seed = seed;
    const Path raw = plan_rrt(m, s, g, cfg);
    const Path a = shortcut_pairs(raw, m, cfg);
    const Path b = shortcut_segment_points(a, m, cfg);
    EXPECT_LE(path_length(a), path_length(raw) + 1e-9);
    EXPECT_LE(path_length(b), path_length(a) + 1e-9);
    expect_valid(m, a, s, g, cfg.inflate);
    expect_valid(m, b, s, g, cfg.inflate);
  }
}

TEST(Shortcut, OpenSpaceCollapsesToStraightLine) {
  const VoxelMap m = open_box();
  RrtConfig cfg;
  cfg.inflate = 0.2;
  const Vec3 s(0.4, 0.4, 0.4), g(3.6, 2.6, 1.6);
  const CollisionChecker checker(m);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.rng_seed = seed;
    const Path p = plan_smoothed(checker, s, g, cfg);
    EXPECT_LE(path_length(p), 1.01 * (g - s).norm());
  }
}
