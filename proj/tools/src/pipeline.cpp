#include "darkstore_cli/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <thread>

#include "darkstore/arrangement.hpp"
#include "darkstore/catalog.hpp"
#include "darkstore/error.hpp"
#include "darkstore/rng.hpp"

namespace darkstore::cli {

SceneFile gen_scene(const RunConfig& cfg, std::uint64_t seed, ValidationReport* report) {
  const StoreSpec store = StoreSpec::rectangle(cfg.store_width, cfg.store_depth, cfg.door_width);
  LayoutParams lp = cfg.layout;
  lp.seed = derive_seed(seed, "gen/layout");
  const Layout layout = generate_layout(store, default_fixture_templates(), lp, default_texture_catalog());
  if (report) *report = validate_layout(layout, lp);
  return scene_from_layout(layout, seed, scenario_preset(cfg.scenario));
}

SceneFile arrange_scene(const SceneFile& scene, const RunConfig& cfg, std::uint64_t seed) {
  LayoutParams lp = cfg.layout;
  lp.seed = derive_seed(seed, "gen/layout");
  const Layout layout = layout_from_scene(scene, lp);
  ArrangeParams ap = cfg.arrange;
  ap.seed = derive_seed(seed, "arrange");
  SceneFile out = scene;
  out.products = default_product_catalog();
  out.arrangement = arrange_store(layout, out.products, cfg.assignment, ap);
  return out;
}

SceneFile deplete_scene(const SceneFile& scene, double days, double rate, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "deplete"));
  SceneFile out = scene;
  out.arrangement = deplete(scene.arrangement, days, rate, rng);
  return out;
}

namespace {

const Item& find_item(const SceneFile& scene, const std::string& id) {
  for (const Item& it : scene.arrangement.items) {
    if (it.instance_id == id) return it;
  }
  throw Error(ErrorCode::state_mismatch, "no item '" + id + "' in the scene");
}

PlanResult plan_item(const SceneFile& scene, const Item& target, const Config& start, const AnchorTemplate& anchors,
                     const RunConfig& cfg, std::uint64_t seed) {
  const RobotModel& model = default_robot_model();
  const CollisionScene obstacles(scene_obstacles(scene, {target.instance_id}, cfg.planner_margin));
  const std::vector<AnchorPose> poses = resolve_template(anchors, anchor_target(scene, target));
  Rng rng(derive_seed(seed, "plan/anchors"));
  return plan_anchors(model, start, poses, obstacles, cfg.planner, rng);
}

}  // namespace

PlanOutcome plan_in_scene(const SceneFile& scene, const PlanRequest& req, const RunConfig& cfg, std::uint64_t seed) {
  const Item& target = find_item(scene, req.target_instance);
  PlanOutcome out;
  out.target_instance = target.instance_id;
  if (req.start) {
    out.start = *req.start;
  } else {
    Rng rng(derive_seed(seed, "plan/start"));
    const auto start = sample_pick_start(scene, target, default_robot_model(), 1.2, rng);
    if (!start) {
      out.result.failure.reason = FailureReason::invalid_start;
      return out;
    }
    out.start = *start;
  }
  out.result = plan_item(scene, target, out.start, req.anchors, cfg, seed);
  return out;
}

std::optional<PlanOutcome> plan_pick_trial(const AnchorTemplate& anchors, const RunConfig& cfg, std::uint64_t seed) {
  const auto trial = make_pick_trial(seed, default_robot_model());
  if (!trial) return std::nullopt;
  PlanOutcome out;
  out.start = trial->start;
  out.target_instance = trial->target_instance;
  out.result = plan_item(trial->scene, find_item(trial->scene, trial->target_instance), trial->start, anchors, cfg,
                         seed);
  return out;
}

std::vector<BatchTrial> run_batch(const AnchorTemplate& anchors, const RunConfig& cfg, std::uint64_t seed,
                                  std::size_t n, int threads, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<BatchTrial> trials(n);
  std::atomic<std::size_t> next{0};
  // Trials share nothing mutable; each owns its seed, slot and output file.
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      BatchTrial& t = trials[k];
      t.index = k;
      t.seed = derive_seed(seed, "batch/" + std::to_string(k));
      const auto outcome = plan_pick_trial(anchors, cfg, t.seed);
      if (!outcome) {
        t.failure = "no_trial";
        continue;
      }
      t.attempted = true;
      t.success = outcome->result.ok();
      if (t.success) {
        t.waypoints = outcome->result.trajectory->waypoints.size();
        char name[32];
        std::snprintf(name, sizeof name, "trial_%05zu.jsonl", k);
        write_text_file((std::filesystem::path(out_dir) / name).string(),
                        serialize_trajectory_log(*outcome->result.trajectory));
      } else {
        t.failure = to_string(outcome->result.failure.reason);
        t.failed_segment = outcome->result.failure.segment;
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  pool.clear();
  return trials;
}

std::string serialize_batch_trial(const BatchTrial& t) {
  const nlohmann::json j{{"index", t.index},         {"seed", t.seed},
                         {"attempted", t.attempted}, {"success", t.success},
                         {"failure", t.failure},     {"failed_segment", t.failed_segment},
                         {"waypoints", t.waypoints}};
  return j.dump();  // keys come out sorted
}

std::vector<std::pair<std::string, std::string>> default_data_files() {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("fixtures.json", serialize_fixture_templates(default_fixture_templates()));
  files.emplace_back("products.json", serialize_products(default_product_catalog()));
  files.emplace_back("textures.json", serialize_textures(default_texture_catalog()));
  files.emplace_back("robot.json", serialize_robot_model(default_robot_model()));
  for (const AnchorTemplate& t : default_anchor_templates()) {
    files.emplace_back("anchors/" + t.task + ".json", serialize_anchor_template(t));
  }
  files.emplace_back("config/default.json", serialize_run_config(RunConfig{}));
  return files;
}

}  // namespace darkstore::cli
