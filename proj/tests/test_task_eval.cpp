#include <gtest/gtest.h>

#include <cmath>

#include "darkstore/error.hpp"
#include "darkstore/rng.hpp"
#include "darkstore/task_eval.hpp"

using namespace darkstore;

namespace {

// One fixture with two boards; board 0 holds lanes of "cola" and "chips",
// board 1 a lane of "cola".
Arrangement small_arrangement() {
  Arrangement arr;
  for (int b = 0; b < 2; ++b) {
    BoardSurface s;
    s.fixture_id = "fx_000";
    s.fixture_center = {2.0, 3.0};
    s.fixture_yaw = 0.5;
    s.board_index = b;
    s.rect = {{-0.5, -0.2}, {0.5, 0.2}};
    s.z = 0.2 + 0.4 * b;
    s.clearance = 0.35;
    arr.surfaces.push_back(s);
  }
  auto add_lane = [&](std::size_t surface, const std::string& product, double x) {
    Lane l;
    l.surface = surface;
    l.product_id = product;
    l.x = x;
    l.slots = {0.15, 0.05, -0.05, -0.15};
    l.occupancy = {1, 1, 1, 1};
    const std::size_t li = arr.lanes.size();
    arr.lanes.push_back(l);
    for (int s = 0; s < 4; ++s) {
      Item it;
      it.instance_id = product + "_" + std::to_string(li) + "_" + std::to_string(s);
      it.product_id = product;
      it.lane = li;
      it.slot = s;
      it.pose = arr.surfaces[surface].frame() * Pose3{{x, l.slots[static_cast<std::size_t>(s)], arr.surfaces[surface].z},
                                                       Quat::identity()};
      arr.items.push_back(it);
    }
  };
  add_lane(0, "cola", -0.3);
  add_lane(0, "chips", 0.1);
  add_lane(1, "cola", 0.2);
  return arr;
}

SceneState state_of(const Arrangement& arr) {
  SceneState s;
  for (const Item& it : arr.items) s.items[it.instance_id] = {it.product_id, it.pose};
  s.doors["door_0"] = 0.0;
  s.basket = {{{5.0, 5.0}, {0.2, 0.15}, 0.0}, 0.3, 0.6};
  return s;
}

TaskSpec pick(const std::string& product = "cola") {
  TaskSpec t;
  t.kind = TaskKind::pick_to_basket;
  t.product_id = product;
  return t;
}

}  // namespace

TEST(Disturbed, Examples) {
  const Arrangement arr = small_arrangement();
  const SceneState before = state_of(arr);
  EXPECT_TRUE(disturbed_items(before, before, pick()).empty());

  SceneState after = before;
  after.items["chips_1_2"].pose.position.x += 0.05;
  EXPECT_EQ(disturbed_items(before, after, pick()), (std::vector<std::string>{"chips_1_2"}));

  // Target moved 30 cm, every other item jittered 2 mm.
  TaskSpec spec = pick();
  spec.target_instances = {"cola_0_0"};
  after = before;
  for (auto& [id, item] : after.items) item.pose.position.y += id == "cola_0_0" ? 0.3 : 0.002;
  EXPECT_TRUE(disturbed_items(before, after, spec).empty());

  // Rotation tolerance.
  after = before;
  after.items["chips_1_0"].pose.orientation = Quat::from_yaw(6.0 * kPi / 180);
  EXPECT_EQ(disturbed_items(before, after, pick()).size(), 1u);
}

TEST(Disturbed, IdMismatchThrows) {
  const SceneState before = state_of(small_arrangement());
  SceneState after = before;
  after.items.erase("chips_1_0");
  try {
    disturbed_items(before, after, pick());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::state_mismatch);
  }
}

TEST(Static, Examples) {
  SceneState s;
  EXPECT_TRUE(robot_static(s, 1e-2));
  s.velocities[0] = 0.5;
  EXPECT_FALSE(robot_static(s, 1e-2));
  s.velocities.fill(1e-2);
  EXPECT_TRUE(robot_static(s, 1e-2));
  s.velocities[5] = -1e-2;
  EXPECT_TRUE(robot_static(s, 1e-2));
  s.velocities[5] = std::nextafter(-1e-2, -1.0);
  EXPECT_FALSE(robot_static(s, 1e-2));
}

TEST(PickToBasket, SuccessAndFailures) {
  const Arrangement arr = small_arrangement();
  const SceneState before = state_of(arr);
  SceneState after = before;
  after.items["cola_0_0"].pose.position = {5.0, 5.0, 0.45};
  EXPECT_TRUE(eval_task(pick(), before, after, arr).success);
  // A different cola instance also counts.
  SceneState other = before;
  other.items["cola_2_3"].pose.position = {5.1, 4.9, 0.4};
  EXPECT_TRUE(eval_task(pick(), before, other, arr).success);
  // Wrong product in the basket.
  SceneState wrong = before;
  wrong.items["chips_1_0"].pose.position = {5.0, 5.0, 0.45};
  const auto rw = eval_task(pick(), before, wrong, arr);
  EXPECT_TRUE(rw.has(Criterion::target_not_placed));
  EXPECT_TRUE(rw.has(Criterion::items_disturbed));

  SceneState knocked = after;
  knocked.items["chips_1_1"].pose.position.x += 0.1;
  const auto rk = eval_task(pick(), before, knocked, arr);
  EXPECT_FALSE(rk.success);
  ASSERT_EQ(rk.failed.size(), 1u);
  EXPECT_EQ(rk.failed[0].kind, Criterion::items_disturbed);
  EXPECT_EQ(rk.failed[0].ids, (std::vector<std::string>{"chips_1_1"}));

  SceneState moving = after;
  moving.velocities[9] = 0.2;
  const auto rm = eval_task(pick(), before, moving, arr);
  EXPECT_TRUE(rm.has(Criterion::robot_moving));
  EXPECT_EQ(rm.success, rm.failed.empty());

  EXPECT_EQ(eval_task(pick(), before, after, arr), eval_task(pick(), before, after, arr));
}

TEST(Door, ThresholdBracket) {
  const Arrangement arr = small_arrangement();
  const SceneState before = state_of(arr);
  TaskSpec open;
  open.kind = TaskKind::open_door;
  open.door_id = "door_0";
  SceneState after = before;
  after.doors["door_0"] = 70.0 * kPi / 180;
  EXPECT_TRUE(eval_task(open, before, after, arr).success);
  after.doors["door_0"] = 50.0 * kPi / 180;
  const auto r = eval_task(open, before, after, arr);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.has(Criterion::door_angle));

  TaskSpec close = open;
  close.kind = TaskKind::close_door;
  after.doors["door_0"] = 4.0 * kPi / 180;
  EXPECT_TRUE(eval_task(close, before, after, arr).success);
  after.doors["door_0"] = 6.0 * kPi / 180;
  EXPECT_FALSE(eval_task(close, before, after, arr).success);

  open.door_id = "door_9";
  try {
    eval_task(open, before, after, arr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::state_mismatch);
  }
}

TEST(BoardToBoard, NearSameProductLane) {
  const Arrangement arr = small_arrangement();
  const SceneState before = state_of(arr);
  TaskSpec spec;
  spec.kind = TaskKind::board_to_board;
  spec.product_id = "cola";
  spec.fixture_id = "fx_000";
  spec.board_index = 1;
  spec.target_instances = {"cola_0_0"};
  const Pose3 frame = arr.surfaces[1].frame();
  // Moved from board 0 to board 1, 0.1 m beside the cola lane.
  SceneState after = before;
  after.items["cola_0_0"].pose = frame * Pose3{{0.3, 0.1, arr.surfaces[1].z}, Quat::identity()};
  EXPECT_TRUE(eval_task(spec, before, after, arr).success);
  // On the board but 0.55 m from the lane, beyond the 0.3 m radius.
  after.items["cola_0_0"].pose = frame * Pose3{{-0.35, 0.1, arr.surfaces[1].z}, Quat::identity()};
  EXPECT_TRUE(eval_task(spec, before, after, arr).has(Criterion::target_not_placed));
  // Above the board's clearance.
  after.items["cola_0_0"].pose = frame * Pose3{{0.3, 0.1, arr.surfaces[1].z + 0.5}, Quat::identity()};
  EXPECT_FALSE(eval_task(spec, before, after, arr).success);
  // Floor pick uses the same placement rule.
  spec.kind = TaskKind::pick_from_floor;
  after.items["cola_0_0"].pose = frame * Pose3{{0.25, -0.1, arr.surfaces[1].z}, Quat::identity()};
  EXPECT_TRUE(eval_task(spec, before, after, arr).success);
  // Without a listed instance the cola already on board 1 satisfies the task.
  spec.target_instances.clear();
  after = before;
  EXPECT_TRUE(eval_task(spec, before, after, arr).success);
}

TEST(Composite, SubtasksInOrder) {
  const Arrangement arr = small_arrangement();
  TaskSpec two;
  two.kind = TaskKind::composite;
  two.subtasks = {pick(), pick()};
  SceneState s0 = state_of(arr), s1 = s0, s2;
  s1.items["cola_0_0"].pose.position = {5.0, 5.0, 0.45};
  s2 = s1;
  s2.items["cola_0_1"].pose.position = {4.95, 5.05, 0.45};
  const std::vector<SceneState> ok = {s0, s1, s2};
  EXPECT_TRUE(eval_task(two, ok, arr).success);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_TRUE(eval_task(two.subtasks[k], std::span<const SceneState>(ok).subspan(k, 2), arr).success);
  }

  SceneState bad = s1;
  bad.items["chips_1_3"].pose.position.z += 0.2;
  const std::vector<SceneState> fails = {s0, s1, bad};
  const auto r = eval_task(two, fails, arr);
  ASSERT_FALSE(r.success);
  ASSERT_EQ(r.failed.size(), 1u);
  EXPECT_EQ(r.failed[0].kind, Criterion::subtask);
  EXPECT_EQ(r.failed[0].subtask, 1u);

  const std::vector<SceneState> short_list = {s0, s1};
  EXPECT_THROW(eval_task(two, short_list, arr), Error);
  TaskSpec empty;
  empty.kind = TaskKind::composite;
  EXPECT_THROW(eval_task(empty, short_list, arr), Error);
}

TEST(Eval, UnknownItemIsMismatch) {
  const Arrangement arr = small_arrangement();
  SceneState before = state_of(arr);
  before.items["ghost"] = {"cola", Pose3{}};
  try {
    eval_task(pick(), before, before, arr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::state_mismatch);
  }
}

TEST(Eval, LooserTolerancesNeverLoseSuccesses) {
  const Arrangement arr = small_arrangement();
  const SceneState before = state_of(arr);
  Rng rng(1);
  std::vector<SceneState> corpus;
  for (int i = 0; i < 300; ++i) {
    SceneState after = before;
    if (rng.bernoulli(0.7)) after.items["cola_0_0"].pose.position = {5.0, 5.0, 0.45};
    for (auto& [id, item] : after.items) {
      if (id == "cola_0_0") continue;
      item.pose.position.x += rng.normal(0.0, 0.01);
      item.pose.orientation = Quat::from_yaw(rng.normal(0.0, 0.05));
    }
    corpus.push_back(after);
  }
  std::vector<bool> prev(corpus.size(), false);
  for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    TaskSpec spec = pick();
    spec.tol.disturb_pos *= scale;
    spec.tol.disturb_rot *= scale;
    int n = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const bool ok = eval_task(spec, before, corpus[i], arr).success;
      if (prev[i]) EXPECT_TRUE(ok);
      prev[i] = ok;
      n += ok;
    }
    EXPECT_GE(n, 0);
  }
}

TEST(Spec, Validation) {
  TaskSpec t = pick();
  t.tol.disturb_pos = 0.0;
  EXPECT_THROW(t.validate(), Error);
  t = pick();
  t.tol.static_vel = -1.0;
  EXPECT_THROW(t.validate(), Error);
}

TEST(Scenario, Presets) {
  const Scenario in = scenario_preset("in_domain");
  EXPECT_TRUE(in.enabled(ScenarioAxis::robot_position));
  EXPECT_FALSE(in.enabled(ScenarioAxis::store_layout));
  const Scenario us = scenario_preset("unseen_scenes");
  EXPECT_TRUE(us.enabled(ScenarioAxis::textures));
  EXPECT_TRUE(us.enabled(ScenarioAxis::store_layout));
  EXPECT_FALSE(us.enabled(ScenarioAxis::unseen_in_task_items));
  const Scenario ui = scenario_preset("unseen_scenes_items");
  EXPECT_TRUE(ui.enabled(ScenarioAxis::unseen_in_task_items));
  EXPECT_FALSE(ui.enabled(ScenarioAxis::unseen_shelf_arrangement));
  EXPECT_FALSE(ui.enabled(ScenarioAxis::completely_unseen_items));
  EXPECT_THROW(scenario_preset("bogus"), Error);
  for (std::size_t a = 0; a < kScenarioAxes; ++a) {
    const auto axis = static_cast<ScenarioAxis>(a);
    EXPECT_EQ(scenario_axis_from_string(to_string(axis)), axis);
  }
}

TEST(Names, RoundTrip) {
  for (TaskKind k : {TaskKind::pick_to_basket, TaskKind::pick_from_floor, TaskKind::board_to_board,
                     TaskKind::open_door, TaskKind::close_door, TaskKind::composite}) {
    EXPECT_EQ(task_kind_from_string(to_string(k)), k);
  }
  for (Criterion c : {Criterion::target_not_placed, Criterion::items_disturbed, Criterion::robot_moving,
                      Criterion::door_angle, Criterion::subtask}) {
    EXPECT_EQ(criterion_from_string(to_string(c)), c);
  }
}
