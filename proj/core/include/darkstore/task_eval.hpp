#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "darkstore/arrangement.hpp"
#include "darkstore/geometry.hpp"
#include "darkstore/planner.hpp"

namespace darkstore {

struct ItemState {
  std::string product_id;
  Pose3 pose;
  bool operator==(const ItemState&) const = default;
};

// One snapshot of the world as a simulator would report it.
struct SceneState {
  std::map<std::string, ItemState> items;
  Config robot{};
  std::array<double, kConfigDim> velocities{};
  std::map<std::string, double> doors;  // door id to opening angle, radians
  Obb3 basket;
  double timestamp = 0.0;
  bool operator==(const SceneState&) const = default;
};

enum class TaskKind { pick_to_basket, pick_from_floor, board_to_board, open_door, close_door, composite };
std::string to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

struct Tolerances {
  double disturb_pos = 0.01;
  double disturb_rot = 5.0 * kPi / 180.0;
  double static_vel = 1e-2;
  double open_angle = 60.0 * kPi / 180.0;
  double closed_angle = 5.0 * kPi / 180.0;
  double proximity = 0.3;
  bool operator==(const Tolerances&) const = default;

  void validate() const;
};

struct TaskSpec {
  TaskKind kind = TaskKind::pick_to_basket;
  std::string product_id;
  // Destination board for placement tasks.
  std::string fixture_id;
  int board_index = 0;
  std::string door_id;
  // Instances the task may move. When non-empty, only these count toward placement.
  std::vector<std::string> target_instances;
  Tolerances tol;
  std::vector<TaskSpec> subtasks;
  bool operator==(const TaskSpec&) const = default;

  void validate() const;
};

enum class Criterion { target_not_placed, items_disturbed, robot_moving, door_angle, subtask };
std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

struct FailedCriterion {
  Criterion kind = Criterion::target_not_placed;
  std::vector<std::string> ids;  // disturbed items
  std::size_t subtask = 0;       // failing subtask index
  bool operator==(const FailedCriterion&) const = default;
};

struct SuccessReport {
  bool success = true;
  std::vector<FailedCriterion> failed;
  bool operator==(const SuccessReport&) const = default;

  bool has(Criterion c) const;
};

// Non-target items that moved more than the tolerances allow.
std::vector<std::string> disturbed_items(const SceneState& before, const SceneState& after, const TaskSpec& spec);
// Inclusive bound on every velocity component.
bool robot_static(const SceneState& state, double eps_v);

// Atomic tasks use one snapshot pair.
SuccessReport eval_task(const TaskSpec& spec, const SceneState& before, const SceneState& after,
                        const Arrangement& arrangement);
// Composite tasks take n + 1 snapshots for n subtasks; subtask k is judged on
// snapshots k and k + 1. Atomic tasks need exactly two.
SuccessReport eval_task(const TaskSpec& spec, std::span<const SceneState> snapshots, const Arrangement& arrangement);

// Test-time randomization axes.
enum class ScenarioAxis {
  robot_position,
  textures,
  store_layout,
  unseen_shelf_arrangement,
  unseen_in_task_items,
  completely_unseen_items,
};
inline constexpr std::size_t kScenarioAxes = 6;
std::string to_string(ScenarioAxis a);
ScenarioAxis scenario_axis_from_string(const std::string& s);

struct Scenario {
  std::string name = "in_domain";
  std::array<bool, kScenarioAxes> axes{true, false, false, false, false, false};
  bool operator==(const Scenario&) const = default;

  bool enabled(ScenarioAxis a) const { return axes[static_cast<std::size_t>(a)]; }
};

// in_domain, unseen_scenes, unseen_scenes_items.
Scenario scenario_preset(const std::string& name);

}  // namespace darkstore
