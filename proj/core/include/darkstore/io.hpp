#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "darkstore/arrangement.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/lod.hpp"
#include "darkstore/planner.hpp"
#include "darkstore/scene.hpp"
#include "darkstore/task_eval.hpp"

namespace darkstore {

// Canonical JSON text: sorted keys, two-space indent, doubles printed with 17
// significant digits and always carrying a decimal point or exponent.
// Semantically equal documents serialize to identical bytes.
std::string canonical_json(std::string_view json_text);

std::string serialize_scene(const SceneFile& scene);
SceneFile parse_scene(std::string_view text);

struct AssetEntry {
  std::string id;
  std::string category;
  double scale = 1.0;  // metres per mesh unit
  std::string orientation = "front +y, up +z, origin at bottom centre";
  std::string mesh_path;
  std::string lod_path;
  Vec3 dims;
  bool operator==(const AssetEntry&) const = default;
};

struct AssetManifest {
  std::vector<AssetEntry> assets;
  bool operator==(const AssetManifest&) const = default;
};

// Bounding box of the scaled mesh matches dims within 2% per axis.
bool manifest_entry_consistent(const AssetEntry& entry, const TriMesh& mesh);

std::string serialize_manifest(const AssetManifest& manifest);
AssetManifest parse_manifest(std::string_view text);

// Header line with dt and segments, then one line per waypoint with
// t, config, gripper and the owning segment's method.
std::string serialize_trajectory_log(const Trajectory& traj);
Trajectory parse_trajectory_log(std::string_view text);

struct SuccessRecord {
  std::string scenario;
  std::string task;
  std::string item;
  std::string fixture;
  bool success = false;
  std::vector<std::string> failed;
  bool operator==(const SuccessRecord&) const = default;
};

SuccessRecord make_success_record(const std::string& scenario, const TaskSpec& spec, const std::string& item,
                                  const SuccessReport& report);
std::string serialize_success_record(const SuccessRecord& r);  // one line, no trailing newline
SuccessRecord parse_success_record(std::string_view line);

std::string serialize_lod_records(const std::vector<LodRecord>& records);

std::string serialize_robot_model(const RobotModel& model);
RobotModel parse_robot_model(std::string_view text);

std::string serialize_anchor_template(const AnchorTemplate& tpl);
AnchorTemplate parse_anchor_template(std::string_view text);

std::string serialize_fixture_templates(const std::vector<FixtureTemplate>& templates);
std::vector<FixtureTemplate> parse_fixture_templates(std::string_view text);
std::string serialize_products(const std::vector<ProductSpec>& products);
std::vector<ProductSpec> parse_products(std::string_view text);
std::string serialize_textures(const TextureCatalog& textures);
TextureCatalog parse_textures(std::string_view text);

// Task evaluation input: spec plus the snapshot sequence.
struct EvalInput {
  std::string scenario = "in_domain";
  std::string item;
  TaskSpec spec;
  std::vector<SceneState> snapshots;
  bool operator==(const EvalInput&) const = default;
};
std::string serialize_eval_input(const EvalInput& in);
EvalInput parse_eval_input(std::string_view text);

// Pipeline configuration. Every section and key is optional; unknown keys
// and wrong types raise config_error naming the key.
struct RunConfig {
  double store_width = 20.0;
  double store_depth = 15.0;
  double door_width = 1.2;
  LayoutParams layout;
  ArrangeParams arrange;
  AssignmentPolicy assignment;
  double deplete_days = 0.0;
  LodParams lod;
  PlannerParams planner;
  double planner_margin = 0.005;
  std::string anchor_template = "pick";
  Tolerances tolerances;
  std::string scenario = "in_domain";
  int batch_n = 10;
  int batch_threads = 0;  // 0 picks the hardware concurrency
  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_run_config(std::string_view text);
std::string serialize_run_config(const RunConfig& cfg);

std::string read_text_file(const std::string& path);
// Writes atomically enough for our use: truncate and write.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace darkstore
