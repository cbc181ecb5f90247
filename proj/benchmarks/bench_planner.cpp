#include <benchmark/benchmark.h>

#include <algorithm>

#include "darkstore/planner.hpp"
#include "darkstore/rng.hpp"
#include "darkstore/scene.hpp"

using namespace darkstore;

namespace {

Config random_config(const RobotModel& m, Rng& rng) {
  Config q{};
  for (std::size_t k = 0; k < kManipDim; ++k) q[kTorsoIndex + k] = rng.uniform(m.lower(k), m.upper(k));
  return q;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const RobotModel& m = default_robot_model();
  Rng rng(1);
  const Config q = random_config(m, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ee_pose(m, q));
}
BENCHMARK(BM_ForwardKinematics);

void BM_Jacobian(benchmark::State& state) {
  const RobotModel& m = default_robot_model();
  Rng rng(2);
  const Config q = random_config(m, rng);
  for (auto _ : state) benchmark::DoNotOptimize(manipulator_jacobian(m, q));
}
BENCHMARK(BM_Jacobian);

void BM_CollisionCheck(benchmark::State& state) {
  const auto trial = make_pick_trial(0, default_robot_model());
  if (!trial) {
    state.SkipWithError("no pick trial");
    return;
  }
  const CollisionScene scene(scene_obstacles(trial->scene));
  for (auto _ : state) benchmark::DoNotOptimize(config_in_collision(default_robot_model(), trial->start, scene));
}
BENCHMARK(BM_CollisionCheck);

void BM_PlanScrew(benchmark::State& state) {
  const RobotModel& m = default_robot_model();
  const CollisionScene empty(SceneObstacles{});
  Rng rng(3);
  std::vector<std::pair<Config, Pose3>> queries;
  while (queries.size() < 32) {
    const Config q = random_config(m, rng);
    Config g = q;
    for (std::size_t k = 1; k < kManipDim; ++k) {
      g[kTorsoIndex + k] = std::clamp(q[kTorsoIndex + k] + rng.uniform(-0.3, 0.3), m.lower(k), m.upper(k));
    }
    if (!config_in_collision(m, q, empty)) queries.emplace_back(q, ee_pose(m, g));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [q, goal] = queries[i++ % queries.size()];
    benchmark::DoNotOptimize(plan_screw(m, q, goal, empty, PlannerParams{}));
  }
}
BENCHMARK(BM_PlanScrew)->Unit(benchmark::kMillisecond);

void BM_PickTrial(benchmark::State& state) {
  const RobotModel& m = default_robot_model();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto trial = make_pick_trial(seed, m);
    if (!trial) continue;
    const Item* target = trial->scene.arrangement.find_item(trial->target_instance);
    const auto anchors = resolve_template(find_anchor_template("pick"), anchor_target(trial->scene, *target));
    const CollisionScene scene(scene_obstacles(trial->scene, {trial->target_instance}));
    Rng rng(seed++);
    benchmark::DoNotOptimize(plan_anchors(m, trial->start, anchors, scene, PlannerParams{}, rng));
  }
}
BENCHMARK(BM_PickTrial)->Unit(benchmark::kMillisecond)->Iterations(5);

}  // namespace
