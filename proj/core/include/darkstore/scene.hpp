#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darkstore/arrangement.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/planner.hpp"
#include "darkstore/task_eval.hpp"

namespace darkstore {

// Everything needed to rebuild a generated store.
struct SceneFile {
  int schema_version = 1;
  std::uint64_t root_seed = 0;
  Scenario scenario;
  StoreSpec store;
  TextureIds textures;
  std::vector<FixtureTemplate> templates;
  std::vector<FixturePlacement> placements;
  Arrangement arrangement;
  std::vector<ProductSpec> products;
  std::vector<std::string> asset_manifest_refs;
  bool operator==(const SceneFile&) const = default;
};

SceneFile scene_from_layout(const Layout& layout, std::uint64_t root_seed, const Scenario& scenario);
// Rebuilds the layout, including the tensor field the passes used.
Layout layout_from_scene(const SceneFile& scene, const LayoutParams& params);

// Collision boxes for the planner. Items listed in exclude are left out.
SceneObstacles scene_obstacles(const SceneFile& scene, const std::vector<std::string>& exclude = {},
                               double margin = 0.005);
Obb3 item_box(const Item& item, const ProductSpec& product);

// Snapshot of the scene at rest with the robot at q.
SceneState scene_state(const SceneFile& scene, const Config& q);

enum class AnchorFrame { world, item, front };
enum class AnchorKind { base, ee, config, gripper };
std::string to_string(AnchorFrame f);
std::string to_string(AnchorKind k);
AnchorFrame anchor_frame_from_string(const std::string& s);
AnchorKind anchor_kind_from_string(const std::string& s);

// One keyframe of a task template. Positions are expressed in frame; the
// item frame sits at the item centre and the front frame on the floor at the
// fixture front, in front of the item. Both share the fixture axes, so +y
// points out of the fixture.
struct AnchorStep {
  AnchorKind kind = AnchorKind::ee;
  AnchorFrame frame = AnchorFrame::item;
  Vec3 offset;
  double yaw = 0.0;    // ee x axis or base heading, relative to the frame
  double pitch = 0.0;  // ee pitch after the yaw
  ManipConfig q{};     // config steps
  bool close = false;  // gripper steps
  AnchorNoise noise;
  bool operator==(const AnchorStep&) const = default;
};

struct AnchorTemplate {
  std::string task;
  std::vector<AnchorStep> steps;
  bool operator==(const AnchorTemplate&) const = default;
};

struct AnchorTarget {
  Pose3 item;   // item frame in the world
  Pose3 front;  // front frame in the world
};

AnchorTarget anchor_target(const SceneFile& scene, const Item& item);
std::vector<AnchorPose> resolve_template(const AnchorTemplate& tpl, const AnchorTarget& target);

// Built-in templates, keyed by task name.
const std::vector<AnchorTemplate>& default_anchor_templates();
const AnchorTemplate& find_anchor_template(const std::string& task);

struct PickTrial {
  SceneFile scene;
  std::string target_instance;
  Config start{};
};

struct PickSuiteParams {
  double store_width = 8.0;
  double store_depth = 6.0;
  double start_distance = 1.2;  // distance of the start pose from the fixture front
};

// Collision-free stowed start in the aisle in front of target, 50 tries.
std::optional<Config> sample_pick_start(const SceneFile& scene, const Item& target, const RobotModel& model,
                                        double start_distance, Rng& rng);

// One seeded pick trial: a generated store, a reachable front item on a shelf
// and a collision-free start configuration. nullopt when no shelf carries
// items.
std::optional<PickTrial> make_pick_trial(std::uint64_t seed, const RobotModel& model,
                                         const PickSuiteParams& params = {});

}  // namespace darkstore
