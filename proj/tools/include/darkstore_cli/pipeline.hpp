#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darkstore/io.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/planner.hpp"
#include "darkstore/scene.hpp"

namespace darkstore::cli {

// Layout for the configured rectangular store. report receives the
// validation result of the generated layout.
SceneFile gen_scene(const RunConfig& cfg, std::uint64_t seed, ValidationReport* report = nullptr);

// Fills every fixture of the scene with the default product catalog.
SceneFile arrange_scene(const SceneFile& scene, const RunConfig& cfg, std::uint64_t seed);

SceneFile deplete_scene(const SceneFile& scene, double days, double rate, std::uint64_t seed);

struct PlanRequest {
  std::string target_instance;
  std::optional<Config> start;  // sampled in front of the target when absent
  AnchorTemplate anchors;
};

struct PlanOutcome {
  PlanResult result;
  Config start{};
  std::string target_instance;
};

PlanOutcome plan_in_scene(const SceneFile& scene, const PlanRequest& req, const RunConfig& cfg, std::uint64_t seed);

// Generated pick trial for one seed; nullopt when no shelf item is reachable.
std::optional<PlanOutcome> plan_pick_trial(const AnchorTemplate& anchors, const RunConfig& cfg, std::uint64_t seed);

struct BatchTrial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool attempted = false;  // false when no trial could be built
  bool success = false;
  std::string failure;     // reason name, empty on success
  std::size_t failed_segment = 0;
  std::size_t waypoints = 0;
};

// Runs n pick trials on threads workers (0 = hardware concurrency). Trial k
// uses the seed derived from (seed, "batch/k") and writes its trajectory log
// to out_dir/trial_k.jsonl when planning succeeds.
std::vector<BatchTrial> run_batch(const AnchorTemplate& anchors, const RunConfig& cfg, std::uint64_t seed,
                                  std::size_t n, int threads, const std::string& out_dir);

std::string serialize_batch_trial(const BatchTrial& t);

// Files of the data/ directory, keyed by relative path.
std::vector<std::pair<std::string, std::string>> default_data_files();

}  // namespace darkstore::cli
