#include "darkstore/render.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "darkstore/error.hpp"
#include "darkstore/io.hpp"

namespace darkstore {

namespace {

const char* kind_colour(FixtureKind k) {
  switch (k) {
    case FixtureKind::shelf: return "#8c6d46";
    case FixtureKind::fridge: return "#4f81bd";
    case FixtureKind::showcase: return "#9bbb59";
    case FixtureKind::pallet: return "#c0504d";
    case FixtureKind::box: return "#8064a2";
  }
  return "#808080";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

struct Frame {
  Rect bounds;
  double scale;
  double px(double x) const { return (x - bounds.min.x) * scale; }
  double py(double y) const { return (bounds.max.y - y) * scale; }
};

Rect drawing_bounds(const SceneFile& scene) {
  Rect r{{1e300, 1e300}, {-1e300, -1e300}};
  for (Vec2 v : scene.store.walls.vertices()) {
    r.min = {std::min(r.min.x, v.x), std::min(r.min.y, v.y)};
    r.max = {std::max(r.max.x, v.x), std::max(r.max.y, v.y)};
  }
  return r;
}

std::vector<FieldGlyph> scene_glyphs(const SceneFile& scene, const LayoutParams& params) {
  if (scene.placements.empty() && scene.store.walls.vertices().empty()) return {};
  return field_glyphs(layout_from_scene(scene, params).field);
}

}  // namespace

std::string render_svg(const SceneFile& scene, const RenderOptions& opts, const LayoutParams& params) {
  const Rect b = drawing_bounds(scene);
  const Frame f{b, opts.pixels_per_metre};
  const double w = (b.max.x - b.min.x) * f.scale;
  const double h = (b.max.y - b.min.y) * f.scale;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
         "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";

  std::string d;
  for (Vec2 v : scene.store.walls.vertices()) {
    d += (d.empty() ? "M " : " L ") + fmt(f.px(v.x)) + " " + fmt(f.py(v.y));
  }
  out += "<path id=\"walls\" d=\"" + d + " Z\" fill=\"#f4f4f4\" stroke=\"#000000\" stroke-width=\"2\"/>\n";

  if (!scene.placements.empty()) {
    out += "<g id=\"fixtures\">\n";
    for (const auto& p : scene.placements) {
      const FixtureTemplate& t = find_template(scene.templates, p.template_id);
      const double deg = -p.yaw * 180.0 / kPi;  // picture y is flipped
      out += "<rect data-id=\"" + p.id + "\" data-kind=\"" + std::string(to_string(t.kind)) + "\" x=\"" +
             fmt(-t.half_extents.x * f.scale) + "\" y=\"" + fmt(-t.half_extents.y * f.scale) + "\" width=\"" +
             fmt(2.0 * t.half_extents.x * f.scale) + "\" height=\"" + fmt(2.0 * t.half_extents.y * f.scale) +
             "\" transform=\"translate(" + fmt(f.px(p.center.x)) + " " + fmt(f.py(p.center.y)) + ") rotate(" +
             fmt(deg) + ")\" fill=\"" + kind_colour(t.kind) + "\" stroke=\"#202020\" stroke-width=\"1\"/>\n";
    }
    out += "</g>\n";
  }

  if (opts.glyphs) {
    out += "<g id=\"glyphs\" stroke=\"#d04040\" stroke-width=\"1\">\n";
    const double half = 0.5 * opts.glyph_length;
    for (const FieldGlyph& g : scene_glyphs(scene, params)) {
      const Vec2 dv{half * std::cos(g.direction), half * std::sin(g.direction)};
      out += "<line x1=\"" + fmt(f.px(g.point.x - dv.x)) + "\" y1=\"" + fmt(f.py(g.point.y - dv.y)) + "\" x2=\"" +
             fmt(f.px(g.point.x + dv.x)) + "\" y2=\"" + fmt(f.py(g.point.y + dv.y)) + "\"/>\n";
    }
    out += "</g>\n";
  }

  if (opts.items && !scene.arrangement.items.empty()) {
    out += "<g id=\"items\" fill=\"#202020\">\n";
    for (const Item& it : scene.arrangement.items) {
      out += "<circle cx=\"" + fmt(f.px(it.pose.position.x)) + "\" cy=\"" + fmt(f.py(it.pose.position.y)) +
             "\" r=\"1\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_json(const SceneFile& scene, const RenderOptions& opts, const LayoutParams& params) {
  using nlohmann::json;
  json walls = json::array();
  for (Vec2 v : scene.store.walls.vertices()) walls.push_back({v.x, v.y});
  json fixtures = json::array();
  for (const auto& p : scene.placements) {
    const FixtureTemplate& t = find_template(scene.templates, p.template_id);
    fixtures.push_back({{"id", p.id},
                        {"kind", std::string(to_string(t.kind))},
                        {"center", {p.center.x, p.center.y}},
                        {"half_extents", {t.half_extents.x, t.half_extents.y}},
                        {"yaw", p.yaw}});
  }
  json j{{"walls", walls}, {"fixtures", fixtures}};
  if (opts.glyphs) {
    json glyphs = json::array();
    for (const FieldGlyph& g : scene_glyphs(scene, params)) glyphs.push_back({g.point.x, g.point.y, g.direction});
    j["glyphs"] = glyphs;
  }
  if (opts.items) {
    json items = json::array();
    for (const Item& it : scene.arrangement.items) items.push_back({it.pose.position.x, it.pose.position.y});
    j["items"] = items;
  }
  return canonical_json(j.dump());
}

std::vector<ActionRecord> export_actions(const Trajectory& traj, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_parameter, "export_actions: dt must be positive");
  if (traj.gripper_closed.size() != traj.waypoints.size()) {
    throw Error(ErrorCode::invalid_parameter, "export_actions: gripper flags do not match waypoints");
  }
  std::vector<ActionRecord> out;
  out.reserve(traj.waypoints.size());
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const Config& q = traj.waypoints[i];
    ActionRecord a{};
    for (std::size_t j = 0; j < 7; ++j) a[kActionArm + j] = q[kArmIndex + j];
    a[kActionGripper] = traj.gripper_closed[i] ? 1.0 : 0.0;
    a[kActionTorso] = q[kTorsoIndex];
    if (i + 1 < traj.waypoints.size()) {
      const Config& n = traj.waypoints[i + 1];
      const Vec2 body = rotate({n[0] - q[0], n[1] - q[1]}, -q[2]);
      a[kActionLinear] = body.x / dt;
      a[kActionAngular] = wrap_angle(n[2] - q[2]) / dt;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<BasePose> integrate_base(const BasePose& start, const std::vector<ActionRecord>& actions, double dt) {
  std::vector<BasePose> out;
  out.reserve(actions.size());
  BasePose p = start;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out.push_back(p);
    const double s = actions[i][kActionLinear] * dt;
    p.x += s * std::cos(p.yaw);
    p.y += s * std::sin(p.yaw);
    p.yaw = wrap_angle(p.yaw + actions[i][kActionAngular] * dt);
  }
  return out;
}

}  // namespace darkstore
