#include "darkstore/task_eval.hpp"

#include <algorithm>
#include <set>

#include "darkstore/error.hpp"

namespace darkstore {

namespace {

const char* const kTaskNames[] = {"pick_to_basket", "pick_from_floor", "board_to_board",
                                  "open_door",      "close_door",      "composite"};
const char* const kCriterionNames[] = {"target_not_placed", "items_disturbed", "robot_moving", "door_angle",
                                       "subtask"};
const char* const kAxisNames[] = {"robot_position",           "textures",
                                  "store_layout",             "unseen_shelf_arrangement",
                                  "unseen_in_task_items",     "completely_unseen_items"};

template <class E, std::size_t N>
E from_names(const char* const (&names)[N], const std::string& s, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (s == names[i]) return static_cast<E>(i);
  }
  throw Error(ErrorCode::parse_error, std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

std::string to_string(TaskKind k) { return kTaskNames[static_cast<std::size_t>(k)]; }
TaskKind task_kind_from_string(const std::string& s) { return from_names<TaskKind>(kTaskNames, s, "task kind"); }
std::string to_string(Criterion c) { return kCriterionNames[static_cast<std::size_t>(c)]; }
Criterion criterion_from_string(const std::string& s) {
  return from_names<Criterion>(kCriterionNames, s, "criterion");
}
std::string to_string(ScenarioAxis a) { return kAxisNames[static_cast<std::size_t>(a)]; }
ScenarioAxis scenario_axis_from_string(const std::string& s) {
  return from_names<ScenarioAxis>(kAxisNames, s, "scenario axis");
}

void Tolerances::validate() const {
  if (!(disturb_pos > 0.0) || !(disturb_rot > 0.0) || !(static_vel > 0.0) || !(open_angle > 0.0) ||
      !(closed_angle > 0.0) || !(proximity > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "task tolerances must be positive");
  }
}

void TaskSpec::validate() const {
  tol.validate();
  if (kind == TaskKind::composite) {
    if (subtasks.empty()) throw Error(ErrorCode::invalid_parameter, "composite task needs at least one subtask");
    for (const auto& s : subtasks) s.validate();
  }
}

bool SuccessReport::has(Criterion c) const {
  return std::any_of(failed.begin(), failed.end(), [c](const FailedCriterion& f) { return f.kind == c; });
}

bool robot_static(const SceneState& state, double eps_v) {
  return std::all_of(state.velocities.begin(), state.velocities.end(),
                     [eps_v](double v) { return std::abs(v) <= eps_v; });
}

namespace {

void check_same_ids(const SceneState& a, const SceneState& b) {
  if (a.items.size() != b.items.size()) throw Error(ErrorCode::state_mismatch, "snapshots have different item sets");
  for (auto ia = a.items.begin(), ib = b.items.begin(); ia != a.items.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw Error(ErrorCode::state_mismatch, "item '" + ia->first + "' missing from a snapshot");
  }
}

const BoardSurface* find_surface(const Arrangement& arr, const std::string& fixture, int board, std::size_t* index) {
  for (std::size_t i = 0; i < arr.surfaces.size(); ++i) {
    if (arr.surfaces[i].fixture_id == fixture && arr.surfaces[i].board_index == board) {
      if (index) *index = i;
      return &arr.surfaces[i];
    }
  }
  return nullptr;
}

bool in_basket(const SceneState& after, const ItemState& item) { return after.basket.contains(item.pose.position); }

// Inside the destination board volume and near a lane of the same product.
bool placed_on_board(const TaskSpec& spec, const ItemState& item, const Arrangement& arr) {
  std::size_t si = 0;
  const BoardSurface* s = find_surface(arr, spec.fixture_id, spec.board_index, &si);
  if (!s) return false;
  const Vec3 local = s->frame().inverse().transform(item.pose.position);
  if (!s->rect.contains(local.xy())) return false;
  if (local.z < s->z - spec.tol.disturb_pos || local.z > s->z + s->clearance) return false;
  for (const Lane& lane : arr.lanes) {
    if (lane.surface != si || lane.product_id != item.product_id || lane.slots.empty()) continue;
    const auto [lo, hi] = std::minmax_element(lane.slots.begin(), lane.slots.end());
    if (point_segment_distance(local.xy(), {lane.x, *lo}, {lane.x, *hi}) <= spec.tol.proximity) return true;
  }
  return false;
}

bool satisfies_placement(const TaskSpec& spec, const SceneState& after, const ItemState& item,
                         const Arrangement* arr) {
  if (item.product_id != spec.product_id) return false;
  switch (spec.kind) {
    case TaskKind::pick_to_basket: return in_basket(after, item);
    case TaskKind::pick_from_floor:
    case TaskKind::board_to_board: return arr != nullptr && placed_on_board(spec, item, *arr);
    default: return false;
  }
}

std::vector<std::string> disturbed_impl(const SceneState& before, const SceneState& after, const TaskSpec& spec,
                                        const Arrangement* arr) {
  check_same_ids(before, after);
  std::set<std::string> excluded(spec.target_instances.begin(), spec.target_instances.end());
  for (const auto& [id, item] : after.items) {
    if (satisfies_placement(spec, after, item, arr)) excluded.insert(id);
  }
  std::vector<std::string> out;
  for (const auto& [id, b] : before.items) {
    if (excluded.count(id)) continue;
    const ItemState& a = after.items.at(id);
    const double dp = (a.pose.position - b.pose.position).norm();
    const double dr = rotation_distance(a.pose.orientation, b.pose.orientation);
    if (dp > spec.tol.disturb_pos || dr > spec.tol.disturb_rot) out.push_back(id);
  }
  return out;
}

SuccessReport atomic(const TaskSpec& spec, const SceneState& before, const SceneState& after,
                     const Arrangement& arr) {
  SuccessReport r;
  auto fail = [&](Criterion c, std::vector<std::string> ids = {}) {
    r.success = false;
    r.failed.push_back({c, std::move(ids), 0});
  };
  switch (spec.kind) {
    case TaskKind::pick_to_basket:
    case TaskKind::pick_from_floor:
    case TaskKind::board_to_board: {
      // Listed target instances narrow the candidates; otherwise any instance of the product counts.
      const bool placed = std::any_of(after.items.begin(), after.items.end(), [&](const auto& kv) {
        if (!spec.target_instances.empty() &&
            std::find(spec.target_instances.begin(), spec.target_instances.end(), kv.first) ==
                spec.target_instances.end()) {
          return false;
        }
        return satisfies_placement(spec, after, kv.second, &arr);
      });
      if (!placed) fail(Criterion::target_not_placed);
      auto moved = disturbed_impl(before, after, spec, &arr);
      if (!moved.empty()) fail(Criterion::items_disturbed, std::move(moved));
      break;
    }
    case TaskKind::open_door:
    case TaskKind::close_door: {
      const auto it = after.doors.find(spec.door_id);
      if (it == after.doors.end()) throw Error(ErrorCode::state_mismatch, "unknown door '" + spec.door_id + "'");
      const bool ok = spec.kind == TaskKind::open_door ? it->second >= spec.tol.open_angle
                                                       : it->second <= spec.tol.closed_angle;
      if (!ok) fail(Criterion::door_angle);
      auto moved = disturbed_impl(before, after, spec, &arr);
      if (!moved.empty()) fail(Criterion::items_disturbed, std::move(moved));
      break;
    }
    case TaskKind::composite: break;
  }
  if (!robot_static(after, spec.tol.static_vel)) fail(Criterion::robot_moving);
  return r;
}

void check_against_arrangement(const SceneState& s, const Arrangement& arr) {
  for (const auto& [id, item] : s.items) {
    const Item* known = arr.find_item(id);
    if (!known) throw Error(ErrorCode::state_mismatch, "item '" + id + "' not in the arrangement");
    if (known->product_id != item.product_id) {
      throw Error(ErrorCode::state_mismatch, "item '" + id + "' has a different product than the arrangement");
    }
  }
}

}  // namespace

std::vector<std::string> disturbed_items(const SceneState& before, const SceneState& after, const TaskSpec& spec) {
  return disturbed_impl(before, after, spec, nullptr);
}

SuccessReport eval_task(const TaskSpec& spec, std::span<const SceneState> snapshots, const Arrangement& arrangement) {
  spec.validate();
  for (const auto& s : snapshots) check_against_arrangement(s, arrangement);
  for (std::size_t i = 1; i < snapshots.size(); ++i) check_same_ids(snapshots[0], snapshots[i]);
  if (spec.kind != TaskKind::composite) {
    if (snapshots.size() != 2) throw Error(ErrorCode::state_mismatch, "atomic task needs exactly two snapshots");
    return atomic(spec, snapshots[0], snapshots[1], arrangement);
  }
  if (snapshots.size() != spec.subtasks.size() + 1) {
    throw Error(ErrorCode::state_mismatch, "composite task needs one snapshot more than it has subtasks");
  }
  for (std::size_t k = 0; k < spec.subtasks.size(); ++k) {
    const SuccessReport sub = eval_task(spec.subtasks[k], snapshots.subspan(k, 2), arrangement);
    if (!sub.success) {
      SuccessReport r;
      r.success = false;
      FailedCriterion f{Criterion::subtask, {}, k};
      for (const auto& c : sub.failed) f.ids.push_back(to_string(c.kind));
      r.failed.push_back(std::move(f));
      return r;
    }
  }
  return {};
}

SuccessReport eval_task(const TaskSpec& spec, const SceneState& before, const SceneState& after,
                        const Arrangement& arrangement) {
  const std::array<SceneState, 2> pair{before, after};
  return eval_task(spec, std::span<const SceneState>(pair), arrangement);
}

Scenario scenario_preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.axes = {};
  s.axes[static_cast<std::size_t>(ScenarioAxis::robot_position)] = true;
  if (name == "in_domain") return s;
  s.axes[static_cast<std::size_t>(ScenarioAxis::textures)] = true;
  s.axes[static_cast<std::size_t>(ScenarioAxis::store_layout)] = true;
  if (name == "unseen_scenes") return s;
  s.axes[static_cast<std::size_t>(ScenarioAxis::unseen_in_task_items)] = true;
  if (name == "unseen_scenes_items") return s;
  throw Error(ErrorCode::config_error, "unknown scenario preset '" + name + "'");
}

}  // namespace darkstore
