#include "darkstore_cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "darkstore/catalog.hpp"
#include "darkstore/error.hpp"
#include "darkstore/io.hpp"
#include "darkstore/lod.hpp"
#include "darkstore/render.hpp"
#include "darkstore/rng.hpp"
#include "darkstore_cli/pipeline.hpp"

namespace darkstore::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

RunConfig load_config(const Globals& g) {
  std::string path = g.config;
  if (path.empty()) {
    if (const char* env = std::getenv("DARKSTORE_CONFIG")) path = env;
  }
  if (path.empty()) return {};
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
  return parse_run_config(text);
}

AnchorTemplate load_template(const std::string& name_or_path) {
  if (fs::is_regular_file(name_or_path)) return parse_anchor_template(read_text_file(name_or_path));
  return find_anchor_template(name_or_path);
}

SceneFile load_scene(const std::string& path) { return parse_scene(read_text_file(path)); }

class Emitter {
 public:
  Emitter(const std::string& path, std::ostream& out) : path_(path), out_(out) {}
  void operator()(const std::string& text) const {
    if (path_.empty()) {
      out_ << text;
    } else {
      if (const fs::path parent = fs::path(path_).parent_path(); !parent.empty()) fs::create_directories(parent);
      write_text_file(path_, text);
    }
  }

 private:
  const std::string& path_;
  std::ostream& out_;
};

std::string describe(const PlanFailure& f) {
  return "planning failed at segment " + std::to_string(f.segment) + ": " + to_string(f.reason) +
         " (screw: " + to_string(f.screw_reason) + ", rrt: " + to_string(f.rrt_reason) + ")";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Procedural dark-store scenes, LOD assets and demonstration planning."};
  app.name("darkstore");
  app.require_subcommand(1, 1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Root seed");
  app.add_option("--config", g.config, "Run configuration (JSON); overrides DARKSTORE_CONFIG");
  app.add_option("--out", g.out, "Output file, or directory for batch and defaults");

  std::string scene_path;
  auto* gen = app.add_subcommand("gen", "Generate a store layout");

  auto* arrange = app.add_subcommand("arrange", "Populate a scene's fixtures with products");
  arrange->add_option("--scene", scene_path, "Input scene")->required();

  std::optional<double> days, rate;
  auto* depl = app.add_subcommand("deplete", "Remove items as Poisson customer demand");
  depl->add_option("--scene", scene_path, "Input scene")->required();
  depl->add_option("--days", days, "Elapsed days");
  depl->add_option("--rate", rate, "Removals per lane per day");

  std::vector<std::string> objs;
  std::string assets = "synthetic";
  std::string mesh_dir;
  auto* lod = app.add_subcommand("lod", "Select an LOD mesh per asset and report");
  lod->add_option("--obj", objs, "OBJ meshes to optimize (repeatable)");
  lod->add_option("--assets", assets, "Built-in asset set when no --obj is given")
      ->check(CLI::IsMember({"synthetic", "products"}));
  lod->add_option("--mesh-dir", mesh_dir, "Write each selected mesh as <id>.lod.obj here");

  std::string target, templ;
  std::vector<double> start;
  auto* plan = app.add_subcommand("plan", "Plan a trajectory from an anchor template");
  plan->add_option("--scene", scene_path, "Arranged scene; a generated pick trial is used when absent");
  plan->add_option("--target", target, "Target item instance id (with --scene)");
  plan->add_option("--start", start, "Start base pose x y yaw (stowed arm)")->expected(3);
  plan->add_option("--template", templ, "Anchor template name or JSON file");

  std::string input;
  auto* eval = app.add_subcommand("eval", "Judge a snapshot sequence against a task spec");
  eval->add_option("--input", input, "Task spec and snapshots")->required();
  eval->add_option("--scene", scene_path, "Scene holding the arrangement")->required();

  std::string format = "svg";
  bool glyphs = false, items = false;
  double scale = 40.0;
  auto* render = app.add_subcommand("render", "Draw a scene top-down");
  render->add_option("--scene", scene_path, "Input scene")->required();
  render->add_option("--format", format, "svg or json")->check(CLI::IsMember({"svg", "json"}));
  render->add_flag("--glyphs", glyphs, "Draw the layout field's major directions");
  render->add_flag("--items", items, "Draw one dot per item");
  render->add_option("--scale", scale, "Pixels per metre")->check(CLI::PositiveNumber);

  std::optional<int> n, threads;
  auto* batch = app.add_subcommand("batch", "Run seeded pick trials end to end in parallel");
  batch->add_option("--n", n, "Number of trials")->check(CLI::PositiveNumber);
  batch->add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  batch->add_option("--template", templ, "Anchor template name or JSON file");

  auto* defaults = app.add_subcommand("defaults", "Write the built-in catalogs, robot and config as data files");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Emitter emit(g.out, out);
  try {
    const RunConfig cfg = load_config(g);

    if (gen->parsed()) {
      ValidationReport report;
      emit(serialize_scene(gen_scene(cfg, g.seed, &report)));
      if (!report.ok) {
        for (const auto& v : report.violations) err << "layout violation: " << to_string(v.kind) << " " << v.detail << "\n";
        return kExitValidation;
      }
      return kExitOk;
    }
    if (arrange->parsed()) {
      emit(serialize_scene(arrange_scene(load_scene(scene_path), cfg, g.seed)));
      return kExitOk;
    }
    if (depl->parsed()) {
      const double d = days.value_or(cfg.deplete_days);
      const double r = rate.value_or(cfg.arrange.depletion_rate);
      if (!(d >= 0.0) || !(r >= 0.0)) {
        err << "deplete: --days and --rate must be >= 0\n";
        return kExitUsage;
      }
      emit(serialize_scene(deplete_scene(load_scene(scene_path), d, r, g.seed)));
      return kExitOk;
    }
    if (lod->parsed()) {
      LodParams p = cfg.lod;
      p.seed = derive_seed(g.seed, "lod");
      std::vector<std::pair<std::string, TriMesh>> meshes;
      if (!objs.empty()) {
        for (const auto& path : objs) meshes.emplace_back(fs::path(path).stem().string(), read_obj_file(path));
      } else if (assets == "products") {
        for (const auto& prod : default_product_catalog()) meshes.emplace_back(prod.id, product_mesh(prod));
      } else {
        for (auto& a : synthetic_assets()) meshes.emplace_back(a.id, std::move(a.mesh));
      }
      if (!mesh_dir.empty()) fs::create_directories(mesh_dir);
      std::vector<LodRecord> records;
      for (const auto& [id, mesh] : meshes) {
        const LodResult r = optimize_asset(id, mesh, p);
        records.push_back(r.record);
        if (!mesh_dir.empty()) {
          write_obj_file((fs::path(mesh_dir) / (id + ".lod.obj")).string(), r.candidates[r.selected].mesh);
        }
      }
      emit(serialize_lod_records(records));
      return kExitOk;
    }
    if (plan->parsed()) {
      const AnchorTemplate anchors = load_template(templ.empty() ? cfg.anchor_template : templ);
      PlanOutcome outcome;
      if (!scene_path.empty()) {
        if (target.empty()) {
          err << "plan: --target is required with --scene\n";
          return kExitUsage;
        }
        PlanRequest req{target, std::nullopt, anchors};
        if (!start.empty()) {
          Config q{};
          q[0] = start[0];
          q[1] = start[1];
          q[2] = wrap_angle(start[2]);
          req.start = with_manip(q, default_robot_model().stow);
        }
        outcome = plan_in_scene(load_scene(scene_path), req, cfg, g.seed);
      } else {
        auto trial = plan_pick_trial(anchors, cfg, g.seed);
        if (!trial) {
          err << "plan: seed " << g.seed << " yields no reachable shelf item\n";
          return kExitValidation;
        }
        outcome = std::move(*trial);
      }
      if (!outcome.result.ok()) {
        err << describe(outcome.result.failure) << "\n";
        return kExitValidation;
      }
      emit(serialize_trajectory_log(*outcome.result.trajectory));
      return kExitOk;
    }
    if (eval->parsed()) {
      const EvalInput in = parse_eval_input(read_text_file(input));
      const SceneFile scene = load_scene(scene_path);
      const SuccessReport report = eval_task(in.spec, in.snapshots, scene.arrangement);
      emit(serialize_success_record(make_success_record(in.scenario, in.spec, in.item, report)) + "\n");
      return kExitOk;
    }
    if (render->parsed()) {
      RenderOptions opts;
      opts.pixels_per_metre = scale;
      opts.glyphs = glyphs;
      opts.items = items;
      const SceneFile scene = load_scene(scene_path);
      emit(format == "json" ? render_json(scene, opts, cfg.layout) : render_svg(scene, opts, cfg.layout));
      return kExitOk;
    }
    if (batch->parsed()) {
      if (g.out.empty()) {
        err << "batch: --out <directory> is required\n";
        return kExitUsage;
      }
      const AnchorTemplate anchors = load_template(templ.empty() ? cfg.anchor_template : templ);
      const auto trials = run_batch(anchors, cfg, g.seed, static_cast<std::size_t>(n.value_or(cfg.batch_n)),
                                    threads.value_or(cfg.batch_threads), g.out);
      std::string summary;
      std::size_t attempted = 0, succeeded = 0;
      for (const auto& t : trials) {
        summary += serialize_batch_trial(t) + "\n";
        attempted += t.attempted;
        succeeded += t.success;
      }
      write_text_file((fs::path(g.out) / "summary.jsonl").string(), summary);
      out << "trials " << trials.size() << ", attempted " << attempted << ", succeeded " << succeeded << "\n";
      return kExitOk;
    }
    if (defaults->parsed()) {
      const fs::path dir = g.out.empty() ? fs::path("data") : fs::path(g.out);
      for (const auto& [rel, text] : default_data_files()) {
        const fs::path p = dir / rel;
        fs::create_directories(p.parent_path());
        write_text_file(p.string(), text);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::config_error:
      case ErrorCode::parse_error:
      case ErrorCode::state_mismatch: return kExitUsage;
      default: return kExitValidation;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace darkstore::cli
