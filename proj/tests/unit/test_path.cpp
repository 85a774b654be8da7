#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tunnelscout/path.hpp"

using namespace tunnelscout;

TEST(PathLength, MatchesIndependentSum) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    Path p;
    const int count = 1 + trial % 9;
    for (int k = 0; k < count; ++k) p.waypoints.emplace_back(n(rng), n(rng), n(rng));
    EXPECT_NEAR(path_length(p), oracle::polyline_length(p.waypoints), 1e-12);
  }
  EXPECT_EQ(path_length(Path{}), 0.0);
}

TEST(RemoveConsecutiveDuplicates, DropsRepeatsAndTheirYaw) {
  Path p;
  p.waypoints = {Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0)};
  p.yaw = {0.0, 0.1, 0.2, 0.3, 0.4};
  remove_consecutive_duplicates(p);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p.yaw, (std::vector<double>{0.0, 0.2, 0.4}));
  EXPECT_EQ(p.back(), Vec3(0, 0, 0));
}
