#include <benchmark/benchmark.h>

#include <random>

#include "tunnelscout/clearance.hpp"
#include "tunnelscout/explorer_fsm.hpp"
#include "tunnelscout/rrt_planner.hpp"
#include "tunnelscout/sensor_sim.hpp"
#include "tunnelscout/sim_world.hpp"
#include "tunnelscout/voxel_map.hpp"
#include "tunnelscout/zigzag_planner.hpp"

using namespace tunnelscout;

namespace {

Pose mid_tunnel() {
  Pose p;
  p.position = Vec3(8.0, 0.0, 1.0);
  p.yaw = 0.0;
  return p;
}

}  // namespace

static void BM_RenderDepthScan(benchmark::State& state) {
  Scenario sc;
  const Scene scene = scene_at(sc, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_depth_scan(scene, sc.camera, mid_tunnel()));
  }
}
BENCHMARK(BM_RenderDepthScan);

static void BM_InsertScan(benchmark::State& state) {
  Scenario sc;
  const DepthScan scan = render_depth_scan(scene_at(sc, 0.0), sc.camera, mid_tunnel());
  VoxelMap map = make_map(sc);
  for (auto _ : state) insert_scan(map, scan);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(scan.rays.size()));
}
BENCHMARK(BM_InsertScan);

static void BM_SegmentCheckExact(benchmark::State& state) {
  Scenario sc;
  const VoxelMap map = ground_truth_map(sc);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.5, 19.5), y(-1.5, 1.5), z(0.4, 2.6);
  for (auto _ : state) {
    const Vec3 a(x(rng), y(rng), z(rng));
    const Vec3 b = a + Vec3(1.5, 0.0, 0.0);
    benchmark::DoNotOptimize(segment_collision_check(map, a, b, 0.25));
  }
}
BENCHMARK(BM_SegmentCheckExact);

static void BM_SegmentCheckDistanceField(benchmark::State& state) {
  Scenario sc;
  const VoxelMap map = ground_truth_map(sc);
  const CollisionChecker checker(map);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.5, 19.5), y(-1.5, 1.5), z(0.4, 2.6);
  for (auto _ : state) {
    const Vec3 a(x(rng), y(rng), z(rng));
    const Vec3 b = a + Vec3(1.5, 0.0, 0.0);
    benchmark::DoNotOptimize(checker.segment_free(a, b, 0.25));
  }
}
BENCHMARK(BM_SegmentCheckDistanceField);

static void BM_BuildDistanceField(benchmark::State& state) {
  Scenario sc;
  const VoxelMap map = ground_truth_map(sc);
  for (auto _ : state) benchmark::DoNotOptimize(CollisionChecker(map));
}
BENCHMARK(BM_BuildDistanceField)->Unit(benchmark::kMillisecond);

static void BM_PlanSmoothedAlongTunnel(benchmark::State& state) {
  Scenario sc;
  sc.obstacles.push_back({0.3, 1.8, Vec3(10, 0.5, 0), Vec3(10, 0.5, 0), 0.0, 0.0});
  const VoxelMap map = ground_truth_map(sc);
  const CollisionChecker checker(map);
  RrtConfig cfg;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.rng_seed = seed++;
    benchmark::DoNotOptimize(plan_smoothed(checker, Vec3(2, 0, 1), Vec3(18, 0, 1), cfg));
  }
}
BENCHMARK(BM_PlanSmoothedAlongTunnel)->Unit(benchmark::kMillisecond);

static void BM_PlanZigzag(benchmark::State& state) {
  FacePatch face;
  face.center = Vec3(20, 0, 1.5);
  face.width = 4.0;
  face.height = 3.0;
  const DepthCamera cam;
  const ZigzagConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(plan_zigzag(face, cam, cfg));
}
BENCHMARK(BM_PlanZigzag);

static void BM_FsmStep(benchmark::State& state) {
  ExplorerContext ctx;
  FsmEvents ev;
  ev.path_done = true;
  ev.path_found = true;
  for (auto _ : state) {
    ctx.active_action = PlannerAction::AddNewForwardPath;
    benchmark::DoNotOptimize(fsm_step(ExplorerState::Forward, ctx, ev));
  }
}
BENCHMARK(BM_FsmStep);

BENCHMARK_MAIN();
