#include "darkstore/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "darkstore/error.hpp"

namespace darkstore {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical writer

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::invalid_parameter, "cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  if (std::string_view(buf).find_first_of(".e") == std::string_view::npos) out += ".0";
}

void write_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void write(std::string& out, const json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write_string(out, it.key());
        out += pretty ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && pretty ? ", " : ",";
        if (!flat) newline(depth + 1);
        write(out, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: write_number(out, j.get<double>()); return;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::boolean:
    case json::value_t::null:
    case json::value_t::string: out += j.dump(); return;
    default: throw Error(ErrorCode::invalid_parameter, "unsupported JSON value");
  }
}

std::string dump(const json& j, bool pretty = true) {
  std::string out;
  write(out, j, pretty ? 2 : -1, 0);
  if (pretty) out += '\n';
  return out;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string(what) + ": " + e.what());
  }
}

// Runs a conversion and rewraps library errors as parse errors.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string(what) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Value helpers

json jv(Vec2 v) { return json::array({v.x, v.y}); }
json jv(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json jq(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }
json jpose(const Pose3& p) { return {{"position", jv(p.position)}, {"orientation", jq(p.orientation)}}; }
json jrect(const Rect& r) { return {{"min", jv(r.min)}, {"max", jv(r.max)}}; }
json jobb3(const Obb3& b) {
  return {{"center", jv(b.footprint.center)},
          {"half_extents", jv(b.footprint.half_extents)},
          {"yaw", b.footprint.yaw},
          {"z_min", b.z_min},
          {"z_max", b.z_max}};
}
template <std::size_t N>
json jarr(const std::array<double, N>& a) {
  json j = json::array();
  for (double v : a) j.push_back(v);
  return j;
}

double num(const json& j) { return j.get<double>(); }
Vec2 v2(const json& j) { return {num(j.at(0)), num(j.at(1))}; }
Vec3 v3(const json& j) { return {num(j.at(0)), num(j.at(1)), num(j.at(2))}; }
Quat quat(const json& j) { return {num(j.at(0)), num(j.at(1)), num(j.at(2)), num(j.at(3))}; }
Pose3 pose(const json& j) { return {v3(j.at("position")), quat(j.at("orientation"))}; }
Rect rect(const json& j) { return {v2(j.at("min")), v2(j.at("max"))}; }
Obb3 obb3(const json& j) {
  return {{v2(j.at("center")), v2(j.at("half_extents")), num(j.at("yaw"))}, num(j.at("z_min")), num(j.at("z_max"))};
}
template <std::size_t N>
std::array<double, N> arr(const json& j) {
  if (j.size() != N) throw Error(ErrorCode::parse_error, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = num(j.at(i));
  return a;
}

// ---------------------------------------------------------------------------
// Domain types

json jtemplate(const FixtureTemplate& t) {
  json boards = json::array();
  for (const Board& b : t.boards) {
    boards.push_back({{"index", b.index},
                      {"z", b.z},
                      {"usable", jrect(b.usable)},
                      {"gap_to_next", b.gap_to_next ? json(*b.gap_to_next) : json(nullptr)}});
  }
  return {{"id", t.id},
          {"kind", std::string(to_string(t.kind))},
          {"half_extents", jv(t.half_extents)},
          {"height", t.height},
          {"panel_thickness", t.panel_thickness},
          {"boards", boards}};
}

FixtureTemplate template_of(const json& j) {
  FixtureTemplate t;
  t.id = j.at("id").get<std::string>();
  t.kind = fixture_kind_from_string(j.at("kind").get<std::string>());
  t.half_extents = v2(j.at("half_extents"));
  t.height = num(j.at("height"));
  t.panel_thickness = num(j.at("panel_thickness"));
  for (const json& b : j.at("boards")) {
    Board board;
    board.index = b.at("index").get<int>();
    board.z = num(b.at("z"));
    board.usable = rect(b.at("usable"));
    if (!b.at("gap_to_next").is_null()) board.gap_to_next = num(b.at("gap_to_next"));
    t.boards.push_back(board);
  }
  t.validate();
  return t;
}

json jproduct(const ProductSpec& p) {
  return {{"id", p.id},           {"category", p.category},   {"dims", jv(p.dims)},
          {"stackable", p.stackable}, {"max_stack", p.max_stack}, {"mesh_ref", p.mesh_ref}};
}

ProductSpec product_of(const json& j) {
  ProductSpec p{j.at("id").get<std::string>(), j.at("category").get<std::string>(), v3(j.at("dims")),
                j.at("stackable").get<bool>(), j.at("max_stack").get<int>(), j.at("mesh_ref").get<std::string>()};
  p.validate();
  return p;
}

json jscenario(const Scenario& s) {
  json axes = json::object();
  for (std::size_t i = 0; i < kScenarioAxes; ++i) axes[to_string(static_cast<ScenarioAxis>(i))] = s.axes[i];
  return {{"name", s.name}, {"axes", axes}};
}

Scenario scenario_of(const json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.axes = {};
  for (auto it = j.at("axes").begin(); it != j.at("axes").end(); ++it) {
    s.axes[static_cast<std::size_t>(scenario_axis_from_string(it.key()))] = it.value().get<bool>();
  }
  return s;
}

json jstore(const StoreSpec& s) {
  json walls = json::array();
  for (Vec2 v : s.walls.vertices()) walls.push_back(jv(v));
  json doors = json::array();
  for (const auto& d : s.doors) doors.push_back({{"id", d.id}, {"a", jv(d.a)}, {"b", jv(d.b)}});
  return {{"width", s.width}, {"depth", s.depth}, {"walls", walls}, {"doors", doors}};
}

StoreSpec store_of(const json& j) {
  StoreSpec s;
  s.width = num(j.at("width"));
  s.depth = num(j.at("depth"));
  std::vector<Vec2> walls;
  for (const json& v : j.at("walls")) walls.push_back(v2(v));
  s.walls = Polygon(std::move(walls));
  for (const json& d : j.at("doors")) s.doors.push_back({d.at("id").get<std::string>(), v2(d.at("a")), v2(d.at("b"))});
  return s;
}

json jarrangement(const Arrangement& a) {
  json surfaces = json::array();
  for (const auto& s : a.surfaces) {
    surfaces.push_back({{"fixture_id", s.fixture_id},
                        {"fixture_center", jv(s.fixture_center)},
                        {"fixture_yaw", s.fixture_yaw},
                        {"board_index", s.board_index},
                        {"rect", jrect(s.rect)},
                        {"z", s.z},
                        {"clearance", s.clearance}});
  }
  json lanes = json::array();
  for (const auto& l : a.lanes) {
    lanes.push_back({{"surface", l.surface},
                     {"product_id", l.product_id},
                     {"x", l.x},
                     {"slots", l.slots},
                     {"occupancy", l.occupancy},
                     {"levels", l.levels}});
  }
  json items = json::array();
  for (const auto& i : a.items) {
    items.push_back({{"instance_id", i.instance_id},
                     {"product_id", i.product_id},
                     {"pose", jpose(i.pose)},
                     {"lane", i.lane},
                     {"slot", i.slot},
                     {"level", i.level}});
  }
  return {{"surfaces", surfaces}, {"lanes", lanes}, {"items", items}};
}

Arrangement arrangement_of(const json& j) {
  Arrangement a;
  for (const json& s : j.at("surfaces")) {
    a.surfaces.push_back({s.at("fixture_id").get<std::string>(), v2(s.at("fixture_center")), num(s.at("fixture_yaw")),
                          s.at("board_index").get<int>(), rect(s.at("rect")), num(s.at("z")), num(s.at("clearance"))});
  }
  for (const json& l : j.at("lanes")) {
    Lane lane;
    lane.surface = l.at("surface").get<std::size_t>();
    lane.product_id = l.at("product_id").get<std::string>();
    lane.x = num(l.at("x"));
    for (const json& v : l.at("slots")) lane.slots.push_back(num(v));
    lane.occupancy = l.at("occupancy").get<std::vector<int>>();
    lane.levels = l.at("levels").get<int>();
    a.lanes.push_back(std::move(lane));
  }
  for (const json& i : j.at("items")) {
    a.items.push_back({i.at("instance_id").get<std::string>(), i.at("product_id").get<std::string>(), pose(i.at("pose")),
                       i.at("lane").get<std::size_t>(), i.at("slot").get<int>(), i.at("level").get<int>()});
  }
  return a;
}

json jspheres(const std::vector<CollisionSphere>& s) {
  json out = json::array();
  for (const auto& sp : s) out.push_back({{"center", jv(sp.center)}, {"radius", sp.radius}});
  return out;
}

std::vector<CollisionSphere> spheres_of(const json& j) {
  std::vector<CollisionSphere> out;
  for (const json& s : j) out.push_back({v3(s.at("center")), num(s.at("radius"))});
  return out;
}

json jtol(const Tolerances& t) {
  return {{"disturb_pos", t.disturb_pos},   {"disturb_rot", t.disturb_rot},   {"static_vel", t.static_vel},
          {"open_angle", t.open_angle},     {"closed_angle", t.closed_angle}, {"proximity", t.proximity}};
}

Tolerances tol_of(const json& j) {
  return {num(j.at("disturb_pos")), num(j.at("disturb_rot")),  num(j.at("static_vel")),
          num(j.at("open_angle")),  num(j.at("closed_angle")), num(j.at("proximity"))};
}

json jtask(const TaskSpec& t) {
  json subs = json::array();
  for (const auto& s : t.subtasks) subs.push_back(jtask(s));
  return {{"kind", to_string(t.kind)},
          {"product_id", t.product_id},
          {"fixture_id", t.fixture_id},
          {"board_index", t.board_index},
          {"door_id", t.door_id},
          {"target_instances", t.target_instances},
          {"tolerances", jtol(t.tol)},
          {"subtasks", subs}};
}

TaskSpec task_of(const json& j) {
  TaskSpec t;
  t.kind = task_kind_from_string(j.at("kind").get<std::string>());
  t.product_id = j.value("product_id", "");
  t.fixture_id = j.value("fixture_id", "");
  t.board_index = j.value("board_index", 0);
  t.door_id = j.value("door_id", "");
  t.target_instances = j.value("target_instances", std::vector<std::string>{});
  if (j.contains("tolerances")) t.tol = tol_of(j.at("tolerances"));
  if (j.contains("subtasks")) {
    for (const json& s : j.at("subtasks")) t.subtasks.push_back(task_of(s));
  }
  t.validate();
  return t;
}

json jstate(const SceneState& s) {
  json items = json::object();
  for (const auto& [id, it] : s.items) items[id] = {{"product_id", it.product_id}, {"pose", jpose(it.pose)}};
  json doors = json::object();
  for (const auto& [id, a] : s.doors) doors[id] = a;
  return {{"items", items},         {"robot", jarr(s.robot)}, {"velocities", jarr(s.velocities)},
          {"doors", doors},         {"basket", jobb3(s.basket)}, {"timestamp", s.timestamp}};
}

SceneState state_of(const json& j) {
  SceneState s;
  for (auto it = j.at("items").begin(); it != j.at("items").end(); ++it) {
    s.items[it.key()] = {it.value().at("product_id").get<std::string>(), pose(it.value().at("pose"))};
  }
  s.robot = arr<kConfigDim>(j.at("robot"));
  s.velocities = arr<kConfigDim>(j.at("velocities"));
  for (auto it = j.at("doors").begin(); it != j.at("doors").end(); ++it) s.doors[it.key()] = num(it.value());
  s.basket = obb3(j.at("basket"));
  s.timestamp = num(j.at("timestamp"));
  return s;
}

}  // namespace

std::string canonical_json(std::string_view json_text) { return dump(parse_json(json_text, "canonical_json")); }

// ---------------------------------------------------------------------------
// Scene

std::string serialize_scene(const SceneFile& s) {
  json templates = json::array();
  for (const auto& t : s.templates) templates.push_back(jtemplate(t));
  json placements = json::array();
  for (const auto& p : s.placements) {
    placements.push_back({{"id", p.id},
                          {"template_id", p.template_id},
                          {"center", jv(p.center)},
                          {"yaw", p.yaw},
                          {"provenance", std::string(to_string(p.provenance))}});
  }
  json products = json::array();
  for (const auto& p : s.products) products.push_back(jproduct(p));
  const json j{{"schema_version", s.schema_version},
               {"root_seed", s.root_seed},
               {"scenario", jscenario(s.scenario)},
               {"store", jstore(s.store)},
               {"textures", {{"floor", s.textures.floor}, {"wall", s.textures.wall}, {"ceiling", s.textures.ceiling}}},
               {"templates", templates},
               {"placements", placements},
               {"arrangement", jarrangement(s.arrangement)},
               {"products", products},
               {"asset_manifest_refs", s.asset_manifest_refs}};
  return dump(j);
}

SceneFile parse_scene(std::string_view text) {
  const json j = parse_json(text, "scene");
  return guarded("scene", [&] {
    SceneFile s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != 1) throw Error(ErrorCode::parse_error, "unsupported scene schema_version");
    s.root_seed = j.at("root_seed").get<std::uint64_t>();
    s.scenario = scenario_of(j.at("scenario"));
    s.store = store_of(j.at("store"));
    const json& tex = j.at("textures");
    s.textures = {tex.at("floor").get<std::string>(), tex.at("wall").get<std::string>(),
                  tex.at("ceiling").get<std::string>()};
    for (const json& t : j.at("templates")) s.templates.push_back(template_of(t));
    for (const json& p : j.at("placements")) {
      s.placements.push_back({p.at("id").get<std::string>(), p.at("template_id").get<std::string>(), v2(p.at("center")),
                              num(p.at("yaw")), provenance_from_string(p.at("provenance").get<std::string>())});
    }
    s.arrangement = arrangement_of(j.at("arrangement"));
    for (const json& p : j.at("products")) s.products.push_back(product_of(p));
    s.asset_manifest_refs = j.at("asset_manifest_refs").get<std::vector<std::string>>();
    return s;
  });
}

// ---------------------------------------------------------------------------
// Manifest

bool manifest_entry_consistent(const AssetEntry& e, const TriMesh& mesh) {
  if (mesh.vertices.empty()) return false;
  const auto [lo, hi] = mesh.bounds();
  const Vec3 size = (hi - lo) * e.scale;
  auto close = [](double a, double b) { return std::abs(a - b) <= 0.02 * std::abs(b); };
  return close(size.x, e.dims.x) && close(size.y, e.dims.y) && close(size.z, e.dims.z);
}

std::string serialize_manifest(const AssetManifest& m) {
  json assets = json::array();
  for (const auto& a : m.assets) {
    assets.push_back({{"id", a.id},
                      {"category", a.category},
                      {"scale", a.scale},
                      {"orientation", a.orientation},
                      {"mesh_path", a.mesh_path},
                      {"lod_path", a.lod_path},
                      {"dims", jv(a.dims)}});
  }
  return dump(json{{"assets", assets}});
}

AssetManifest parse_manifest(std::string_view text) {
  const json j = parse_json(text, "manifest");
  return guarded("manifest", [&] {
    AssetManifest m;
    for (const json& a : j.at("assets")) {
      m.assets.push_back({a.at("id").get<std::string>(), a.at("category").get<std::string>(), num(a.at("scale")),
                          a.at("orientation").get<std::string>(), a.at("mesh_path").get<std::string>(),
                          a.at("lod_path").get<std::string>(), v3(a.at("dims"))});
    }
    return m;
  });
}

// ---------------------------------------------------------------------------
// Trajectory log

std::string serialize_trajectory_log(const Trajectory& t) {
  if (t.gripper_closed.size() != t.waypoints.size()) {
    throw Error(ErrorCode::invalid_parameter, "trajectory gripper flags do not match waypoints");
  }
  json segments = json::array();
  for (const auto& s : t.segments) {
    segments.push_back({{"anchor", s.anchor_index},
                        {"method", to_string(s.method)},
                        {"status", s.status},
                        {"begin", s.begin},
                        {"end", s.end}});
  }
  std::string out = dump(json{{"type", "header"}, {"dt", t.dt}, {"waypoints", t.waypoints.size()}, {"segments", segments}},
                         false);
  out += '\n';
  std::size_t seg = 0;
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
    // The owning segment is the first one that ends at or after i.
    while (seg + 1 < t.segments.size() && t.segments[seg].end < i) ++seg;
    const std::string method = t.segments.empty() ? "none" : to_string(t.segments[seg].method);
    out += dump(json{{"type", "waypoint"},
                     {"index", i},
                     {"t", static_cast<double>(i) * t.dt},
                     {"config", jarr(t.waypoints[i])},
                     {"gripper", static_cast<bool>(t.gripper_closed[i])},
                     {"method", method}},
                false);
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Trajectory t;
  bool header = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = parse_json(line, "trajectory log");
    guarded("trajectory log", [&] {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        header = true;
        t.dt = num(j.at("dt"));
        expected = j.at("waypoints").get<std::size_t>();
        for (const json& s : j.at("segments")) {
          t.segments.push_back({s.at("anchor").get<std::size_t>(), segment_method_from_string(s.at("method").get<std::string>()),
                                s.at("status").get<std::string>(), s.at("begin").get<std::size_t>(),
                                s.at("end").get<std::size_t>()});
        }
      } else if (type == "waypoint") {
        if (j.at("index").get<std::size_t>() != t.waypoints.size()) {
          throw Error(ErrorCode::parse_error, "trajectory log: waypoint index out of order");
        }
        t.waypoints.push_back(arr<kConfigDim>(j.at("config")));
        t.gripper_closed.push_back(j.at("gripper").get<bool>());
      } else {
        throw Error(ErrorCode::parse_error, "trajectory log: unknown record type '" + type + "'");
      }
      return 0;
    });
  }
  if (!header) throw Error(ErrorCode::parse_error, "trajectory log: missing header");
  if (expected != t.waypoints.size()) throw Error(ErrorCode::parse_error, "trajectory log: waypoint count mismatch");
  return t;
}

// ---------------------------------------------------------------------------
// Success records

SuccessRecord make_success_record(const std::string& scenario, const TaskSpec& spec, const std::string& item,
                                  const SuccessReport& report) {
  SuccessRecord r;
  r.scenario = scenario;
  r.task = to_string(spec.kind);
  r.item = item.empty() ? spec.product_id : item;
  r.fixture = spec.kind == TaskKind::open_door || spec.kind == TaskKind::close_door ? spec.door_id : spec.fixture_id;
  r.success = report.success;
  for (const auto& f : report.failed) {
    std::string s = to_string(f.kind);
    if (f.kind == Criterion::subtask) s += "(" + std::to_string(f.subtask) + ")";
    if (f.kind == Criterion::items_disturbed) {
      s += "(";
      for (std::size_t i = 0; i < f.ids.size(); ++i) s += (i ? "," : "") + f.ids[i];
      s += ")";
    }
    r.failed.push_back(s);
  }
  return r;
}

std::string serialize_success_record(const SuccessRecord& r) {
  return dump(json{{"scenario", r.scenario}, {"task", r.task},       {"item", r.item},
                   {"fixture", r.fixture},   {"success", r.success}, {"failed", r.failed}},
              false);
}

SuccessRecord parse_success_record(std::string_view line) {
  const json j = parse_json(line, "success record");
  return guarded("success record", [&] {
    return SuccessRecord{j.at("scenario").get<std::string>(), j.at("task").get<std::string>(),
                         j.at("item").get<std::string>(),     j.at("fixture").get<std::string>(),
                         j.at("success").get<bool>(),         j.at("failed").get<std::vector<std::string>>()};
  });
}

std::string serialize_lod_records(const std::vector<LodRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"asset_id", r.asset_id},
                   {"method", r.method},
                   {"tri_before", r.tri_before},
                   {"tri_after", r.tri_after},
                   {"chamfer", r.chamfer},
                   {"rel_dist", r.rel_dist},
                   {"rel_tris", r.rel_tris}});
  }
  return dump(json{{"records", arr}});
}

// ---------------------------------------------------------------------------
// Robot model and anchor templates

std::string serialize_robot_model(const RobotModel& m) {
  json arm = json::array();
  for (const auto& j : m.arm) {
    arm.push_back({{"name", j.name},
                   {"offset", jpose(j.offset)},
                   {"axis", jv(j.axis)},
                   {"limits", json::array({j.lo, j.hi})},
                   {"spheres", jspheres(j.spheres)}});
  }
  return dump(json{{"name", m.name},
                   {"base_radius", m.base_radius},
                   {"base_spheres", jspheres(m.base_spheres)},
                   {"torso_offset", jpose(m.torso_offset)},
                   {"torso_limits", json::array({m.torso_lo, m.torso_hi})},
                   {"torso_spheres", jspheres(m.torso_spheres)},
                   {"arm", arm},
                   {"ee_offset", jpose(m.ee_offset)},
                   {"stow", jarr(m.stow)}});
}

RobotModel parse_robot_model(std::string_view text) {
  const json j = parse_json(text, "robot model");
  return guarded("robot model", [&] {
    RobotModel m;
    m.name = j.at("name").get<std::string>();
    m.base_radius = num(j.at("base_radius"));
    m.base_spheres = spheres_of(j.at("base_spheres"));
    m.torso_offset = pose(j.at("torso_offset"));
    m.torso_lo = num(j.at("torso_limits").at(0));
    m.torso_hi = num(j.at("torso_limits").at(1));
    m.torso_spheres = spheres_of(j.at("torso_spheres"));
    for (const json& a : j.at("arm")) {
      m.arm.push_back({a.at("name").get<std::string>(), pose(a.at("offset")), v3(a.at("axis")),
                       num(a.at("limits").at(0)), num(a.at("limits").at(1)), spheres_of(a.at("spheres"))});
    }
    m.ee_offset = pose(j.at("ee_offset"));
    m.stow = arr<kManipDim>(j.at("stow"));
    m.validate();
    return m;
  });
}

std::string serialize_anchor_template(const AnchorTemplate& tpl) {
  json steps = json::array();
  for (const auto& s : tpl.steps) {
    steps.push_back({{"kind", to_string(s.kind)},
                     {"frame", to_string(s.frame)},
                     {"offset", jv(s.offset)},
                     {"yaw", s.yaw},
                     {"pitch", s.pitch},
                     {"q", jarr(s.q)},
                     {"close", s.close},
                     {"noise", {{"position", s.noise.position}, {"yaw", s.noise.yaw}, {"joint", s.noise.joint}}}});
  }
  return dump(json{{"task", tpl.task}, {"steps", steps}});
}

AnchorTemplate parse_anchor_template(std::string_view text) {
  const json j = parse_json(text, "anchor template");
  return guarded("anchor template", [&] {
    AnchorTemplate t;
    t.task = j.at("task").get<std::string>();
    for (const json& s : j.at("steps")) {
      AnchorStep st;
      st.kind = anchor_kind_from_string(s.at("kind").get<std::string>());
      st.frame = anchor_frame_from_string(s.at("frame").get<std::string>());
      st.offset = v3(s.at("offset"));
      st.yaw = num(s.at("yaw"));
      st.pitch = num(s.at("pitch"));
      st.q = arr<kManipDim>(s.at("q"));
      st.close = s.at("close").get<bool>();
      const json& n = s.at("noise");
      st.noise = {num(n.at("position")), num(n.at("yaw")), num(n.at("joint"))};
      st.noise.validate();
      t.steps.push_back(st);
    }
    return t;
  });
}

// ---------------------------------------------------------------------------
// Catalogs

std::string serialize_fixture_templates(const std::vector<FixtureTemplate>& templates) {
  json arr = json::array();
  for (const auto& t : templates) arr.push_back(jtemplate(t));
  return dump(json{{"templates", arr}});
}

std::vector<FixtureTemplate> parse_fixture_templates(std::string_view text) {
  const json j = parse_json(text, "fixture templates");
  return guarded("fixture templates", [&] {
    std::vector<FixtureTemplate> out;
    for (const json& t : j.at("templates")) out.push_back(template_of(t));
    return out;
  });
}

std::string serialize_products(const std::vector<ProductSpec>& products) {
  json arr = json::array();
  for (const auto& p : products) arr.push_back(jproduct(p));
  return dump(json{{"products", arr}});
}

std::vector<ProductSpec> parse_products(std::string_view text) {
  const json j = parse_json(text, "products");
  return guarded("products", [&] {
    std::vector<ProductSpec> out;
    for (const json& p : j.at("products")) out.push_back(product_of(p));
    return out;
  });
}

std::string serialize_textures(const TextureCatalog& t) {
  return dump(json{{"floor", t.floor}, {"wall", t.wall}, {"ceiling", t.ceiling}});
}

TextureCatalog parse_textures(std::string_view text) {
  const json j = parse_json(text, "textures");
  return guarded("textures", [&] {
    return TextureCatalog{j.at("floor").get<std::vector<std::string>>(), j.at("wall").get<std::vector<std::string>>(),
                          j.at("ceiling").get<std::vector<std::string>>()};
  });
}

std::string serialize_eval_input(const EvalInput& in) {
  json snaps = json::array();
  for (const auto& s : in.snapshots) snaps.push_back(jstate(s));
  return dump(json{{"scenario", in.scenario}, {"item", in.item}, {"spec", jtask(in.spec)}, {"snapshots", snaps}});
}

EvalInput parse_eval_input(std::string_view text) {
  const json j = parse_json(text, "eval input");
  return guarded("eval input", [&] {
    EvalInput in;
    in.scenario = j.value("scenario", "in_domain");
    in.item = j.value("item", "");
    in.spec = task_of(j.at("spec"));
    for (const json& s : j.at("snapshots")) in.snapshots.push_back(state_of(s));
    return in;
  });
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

// Reads typed keys from one config object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error(ErrorCode::config_error, "config key '" + name_ + "': expected an object");
  }
  ~Section() = default;

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }
  void size(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void strings(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_string(); })) {
        fail(key, "expected a list of strings");
      }
      out = v->get<std::vector<std::string>>();
    }
  }
  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
        fail(key, "expected a list of numbers");
      }
      out = v->get<std::vector<double>>();
    }
  }
  // Call after all reads.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw Error(ErrorCode::config_error, "unknown config key '" + name_ + "." + it.key() + "'");
      }
    }
  }
  // Turns a parameter validation failure into a config error for this section.
  template <class F>
  void check(F&& f) const {
    try {
      f();
    } catch (const Error& e) {
      throw Error(ErrorCode::config_error, "config key '" + name_ + "': " + e.what());
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw Error(ErrorCode::config_error, "config key '" + name_ + "." + key + "': " + what);
  }

  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section top(j, "config");
  if (j.contains("store")) {
    Section s(j.at("store"), "store");
    s.number("width", c.store_width);
    s.number("depth", c.store_depth);
    s.number("door_width", c.door_width);
    s.finish();
    if (!(c.store_width > 0.0) || !(c.store_depth > 0.0) || !(c.door_width > 0.0)) {
      throw Error(ErrorCode::config_error, "config key 'store': dimensions must be positive");
    }
  }
  if (j.contains("layout")) {
    Section s(j.at("layout"), "layout");
    LayoutParams& p = c.layout;
    s.number("passage_width", p.passage_width);
    s.number("skip_prob", p.skip_prob);
    s.integer("max_attempts", p.max_attempts);
    s.integer("n_seed_fixtures", p.n_seed_fixtures);
    s.number("angle_tol", p.angle_tol);
    s.number("max_edge", p.max_edge);
    s.number("decay", p.decay);
    s.number("field_resolution", p.field_resolution);
    s.number("nav_resolution", p.nav_resolution);
    s.number("fixture_gap", p.fixture_gap);
    s.boolean("back_to_back", p.back_to_back);
    s.boolean("rebuild_field_between_passes", p.rebuild_field_between_passes);
    s.finish();
    s.check([&] { p.validate(); });
  }
  if (j.contains("arrange")) {
    Section s(j.at("arrange"), "arrange");
    ArrangeParams& p = c.arrange;
    s.number("gap", p.gap);
    s.number("jitter_pos", p.jitter_pos);
    s.number("jitter_yaw", p.jitter_yaw);
    s.number("depletion_rate", p.depletion_rate);
    s.number("margin", p.margin);
    s.integer("jitter_retries", p.jitter_retries);
    s.integer("facings_min", c.assignment.facings_min);
    s.integer("facings_max", c.assignment.facings_max);
    s.strings("categories", c.assignment.categories);
    s.finish();
    s.check([&] {
      p.validate();
      if (c.assignment.facings_min < 1 || c.assignment.facings_max < c.assignment.facings_min) {
        throw Error(ErrorCode::invalid_parameter, "facings must satisfy 1 <= facings_min <= facings_max");
      }
    });
  }
  if (j.contains("deplete")) {
    Section s(j.at("deplete"), "deplete");
    s.number("days", c.deplete_days);
    s.finish();
    if (!(c.deplete_days >= 0.0)) throw Error(ErrorCode::config_error, "config key 'deplete.days': must be >= 0");
  }
  if (j.contains("lod")) {
    Section s(j.at("lod"), "lod");
    s.size("samples", c.lod.samples);
    s.numbers("cluster_fractions", c.lod.cluster_fractions);
    s.integer("cylinder_segments", c.lod.cylinder_segments);
    s.finish();
    if (c.lod.samples == 0) throw Error(ErrorCode::config_error, "config key 'lod.samples': must be >= 1");
    if (c.lod.cylinder_segments < 3) {
      throw Error(ErrorCode::config_error, "config key 'lod.cylinder_segments': must be >= 3");
    }
    for (double f : c.lod.cluster_fractions) {
      if (!(f > 0.0)) throw Error(ErrorCode::config_error, "config key 'lod.cluster_fractions': must be positive");
    }
  }
  if (j.contains("planner")) {
    Section s(j.at("planner"), "planner");
    PlannerParams& p = c.planner;
    s.number("dq_revolute", p.dq_revolute);
    s.number("dq_prismatic", p.dq_prismatic);
    s.number("rrt_eta", p.rrt_eta);
    s.integer("max_iters", p.max_iters);
    s.number("damping", p.damping);
    s.number("screw_step_pos", p.screw_step_pos);
    s.number("screw_step_rot", p.screw_step_rot);
    s.integer("ik_iters", p.ik_iters);
    s.number("ik_tol_pos", p.ik_tol_pos);
    s.number("ik_tol_rot", p.ik_tol_rot);
    s.integer("shortcut_attempts", p.shortcut_attempts);
    s.integer("goal_ik_attempts", p.goal_ik_attempts);
    s.integer("goal_ik_iters", p.goal_ik_iters);
    s.number("clearance_cap", p.clearance_cap);
    s.number("margin", c.planner_margin);
    s.string("anchor_template", c.anchor_template);
    s.finish();
    s.check([&] {
      p.validate();
      if (!(c.planner_margin >= 0.0)) throw Error(ErrorCode::invalid_parameter, "margin must be >= 0");
    });
  }
  if (j.contains("task")) {
    Section s(j.at("task"), "task");
    Tolerances& t = c.tolerances;
    s.number("disturb_pos", t.disturb_pos);
    s.number("disturb_rot", t.disturb_rot);
    s.number("static_vel", t.static_vel);
    s.number("open_angle", t.open_angle);
    s.number("closed_angle", t.closed_angle);
    s.number("proximity", t.proximity);
    s.finish();
    s.check([&] { t.validate(); });
  }
  if (j.contains("batch")) {
    Section s(j.at("batch"), "batch");
    s.integer("n", c.batch_n);
    s.integer("threads", c.batch_threads);
    s.finish();
    if (c.batch_n < 1) throw Error(ErrorCode::config_error, "config key 'batch.n': must be >= 1");
    if (c.batch_threads < 0) throw Error(ErrorCode::config_error, "config key 'batch.threads': must be >= 0");
  }
  // Top-level keys: the sections above plus the scenario name.
  {
    json sections = json::object();
    for (const char* key : {"store", "layout", "arrange", "deplete", "lod", "planner", "task", "batch"}) {
      if (j.contains(key)) sections[key] = true;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!sections.contains(it.key()) && it.key() != "scenario") {
        throw Error(ErrorCode::config_error, "unknown config key '" + it.key() + "'");
      }
    }
  }
  top.string("scenario", c.scenario);
  try {
    scenario_preset(c.scenario);
  } catch (const Error&) {
    throw Error(ErrorCode::config_error, "config key 'scenario': unknown preset '" + c.scenario + "'");
  }
  return c;
}

std::string serialize_run_config(const RunConfig& c) {
  const LayoutParams& l = c.layout;
  const ArrangeParams& a = c.arrange;
  const PlannerParams& p = c.planner;
  const Tolerances& t = c.tolerances;
  const json j{
      {"store", {{"width", c.store_width}, {"depth", c.store_depth}, {"door_width", c.door_width}}},
      {"layout",
       {{"passage_width", l.passage_width},
        {"skip_prob", l.skip_prob},
        {"max_attempts", l.max_attempts},
        {"n_seed_fixtures", l.n_seed_fixtures},
        {"angle_tol", l.angle_tol},
        {"max_edge", l.max_edge},
        {"decay", l.decay},
        {"field_resolution", l.field_resolution},
        {"nav_resolution", l.nav_resolution},
        {"fixture_gap", l.fixture_gap},
        {"back_to_back", l.back_to_back},
        {"rebuild_field_between_passes", l.rebuild_field_between_passes}}},
      {"arrange",
       {{"gap", a.gap},
        {"jitter_pos", a.jitter_pos},
        {"jitter_yaw", a.jitter_yaw},
        {"depletion_rate", a.depletion_rate},
        {"margin", a.margin},
        {"jitter_retries", a.jitter_retries},
        {"facings_min", c.assignment.facings_min},
        {"facings_max", c.assignment.facings_max},
        {"categories", c.assignment.categories}}},
      {"deplete", {{"days", c.deplete_days}}},
      {"lod",
       {{"samples", c.lod.samples},
        {"cluster_fractions", c.lod.cluster_fractions},
        {"cylinder_segments", c.lod.cylinder_segments}}},
      {"planner",
       {{"dq_revolute", p.dq_revolute},
        {"dq_prismatic", p.dq_prismatic},
        {"rrt_eta", p.rrt_eta},
        {"max_iters", p.max_iters},
        {"damping", p.damping},
        {"screw_step_pos", p.screw_step_pos},
        {"screw_step_rot", p.screw_step_rot},
        {"ik_iters", p.ik_iters},
        {"ik_tol_pos", p.ik_tol_pos},
        {"ik_tol_rot", p.ik_tol_rot},
        {"shortcut_attempts", p.shortcut_attempts},
        {"goal_ik_attempts", p.goal_ik_attempts},
        {"goal_ik_iters", p.goal_ik_iters},
        {"clearance_cap", p.clearance_cap},
        {"margin", c.planner_margin},
        {"anchor_template", c.anchor_template}}},
      {"task",
       {{"disturb_pos", t.disturb_pos},
        {"disturb_rot", t.disturb_rot},
        {"static_vel", t.static_vel},
        {"open_angle", t.open_angle},
        {"closed_angle", t.closed_angle},
        {"proximity", t.proximity}}},
      {"scenario", c.scenario},
      {"batch", {{"n", c.batch_n}, {"threads", c.batch_threads}}},
  };
  return dump(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::parse_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::parse_error, "failed writing '" + path + "'");
}

}  // namespace darkstore
