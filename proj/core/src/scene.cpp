#include "darkstore/scene.hpp"

#include <algorithm>
#include <map>

#include "darkstore/catalog.hpp"
#include "darkstore/error.hpp"

namespace darkstore {

SceneFile scene_from_layout(const Layout& layout, std::uint64_t root_seed, const Scenario& scenario) {
  SceneFile s;
  s.root_seed = root_seed;
  s.scenario = scenario;
  s.store = layout.store;
  s.textures = layout.textures;
  s.templates = layout.templates;
  s.placements = layout.placements;
  return s;
}

Layout layout_from_scene(const SceneFile& scene, const LayoutParams& params) {
  Layout l;
  l.store = scene.store;
  l.templates = scene.templates;
  l.placements = scene.placements;
  l.textures = scene.textures;
  l.params = params;
  std::vector<FixturePlacement> seeded;
  for (const auto& p : scene.placements) {
    if (p.provenance == Provenance::seeded) seeded.push_back(p);
  }
  l.field = layout_field(scene.store, scene.templates, seeded, params);
  return l;
}

Obb3 item_box(const Item& item, const ProductSpec& product) {
  const double yaw = item.pose.orientation.yaw();
  return {{item.pose.position.xy(), {0.5 * product.dims.x, 0.5 * product.dims.y}, yaw},
          item.pose.position.z,
          item.pose.position.z + product.dims.z};
}

SceneObstacles scene_obstacles(const SceneFile& scene, const std::vector<std::string>& exclude, double margin) {
  SceneObstacles obs;
  obs.margin = margin;
  obs.floor = scene.store.walls;
  for (const auto& p : scene.placements) {
    const auto boxes = fixture_obstacles(find_template(scene.templates, p.template_id), p);
    obs.static_boxes.insert(obs.static_boxes.end(), boxes.begin(), boxes.end());
  }
  // Walls as thin slabs just outside the polygon.
  const Polygon& w = scene.store.walls;
  constexpr double kWall = 0.1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Vec2 a = w[i];
    const Vec2 b = w.edge_end(i);
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len <= 0.0) continue;
    const Vec2 outward{d.y / len, -d.x / len};  // counter-clockwise winding
    obs.static_boxes.push_back(
        {{(a + b) * 0.5 + outward * (0.5 * kWall), {0.5 * len + kWall, 0.5 * kWall}, std::atan2(d.y, d.x)}, 0.0, 3.0});
  }
  std::map<std::string, const ProductSpec*> products;
  for (const auto& p : scene.products) products[p.id] = &p;
  for (const Item& it : scene.arrangement.items) {
    if (std::find(exclude.begin(), exclude.end(), it.instance_id) != exclude.end()) continue;
    const auto found = products.find(it.product_id);
    if (found == products.end()) throw Error(ErrorCode::state_mismatch, "unknown product '" + it.product_id + "'");
    obs.dynamic_boxes.push_back(item_box(it, *found->second));
  }
  return obs;
}

SceneState scene_state(const SceneFile& scene, const Config& q) {
  SceneState s;
  for (const Item& it : scene.arrangement.items) s.items[it.instance_id] = {it.product_id, it.pose};
  s.robot = q;
  for (const auto& d : scene.store.doors) s.doors[d.id] = 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Anchor templates

namespace {

const char* const kFrameNames[] = {"world", "item", "front"};
const char* const kKindNames[] = {"base", "ee", "config", "gripper"};

}  // namespace

std::string to_string(AnchorFrame f) { return kFrameNames[static_cast<int>(f)]; }
std::string to_string(AnchorKind k) { return kKindNames[static_cast<int>(k)]; }

AnchorFrame anchor_frame_from_string(const std::string& s) {
  for (int i = 0; i < 3; ++i) {
    if (s == kFrameNames[i]) return static_cast<AnchorFrame>(i);
  }
  throw Error(ErrorCode::parse_error, "unknown anchor frame '" + s + "'");
}

AnchorKind anchor_kind_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kKindNames[i]) return static_cast<AnchorKind>(i);
  }
  throw Error(ErrorCode::parse_error, "unknown anchor kind '" + s + "'");
}

AnchorTarget anchor_target(const SceneFile& scene, const Item& item) {
  const BoardSurface& surf = scene.arrangement.surfaces.at(scene.arrangement.lanes.at(item.lane).surface);
  const ProductSpec& prod = find_product(scene.products, item.product_id);
  const FixturePlacement* fx = nullptr;
  for (const auto& p : scene.placements) {
    if (p.id == surf.fixture_id) fx = &p;
  }
  if (!fx) throw Error(ErrorCode::state_mismatch, "unknown fixture '" + surf.fixture_id + "'");
  const FixtureTemplate& tmpl = find_template(scene.templates, fx->template_id);
  const Pose3 frame = surf.frame();
  const Vec3 local = frame.inverse().transform(item.pose.position);
  AnchorTarget t;
  t.item = {item.pose.position + Vec3{0, 0, 0.5 * prod.dims.z}, frame.orientation};
  t.front = frame * Pose3{{local.x, tmpl.half_extents.y, 0.0}, Quat::identity()};
  return t;
}

std::vector<AnchorPose> resolve_template(const AnchorTemplate& tpl, const AnchorTarget& target) {
  std::vector<AnchorPose> out;
  for (const AnchorStep& s : tpl.steps) {
    const Pose3 frame = s.frame == AnchorFrame::world  ? Pose3::identity()
                        : s.frame == AnchorFrame::item ? target.item
                                                       : target.front;
    AnchorPose a;
    a.noise = s.noise;
    switch (s.kind) {
      case AnchorKind::base: {
        const Vec3 p = frame.transform(s.offset);
        a.goal = BaseGoal{p.xy(), wrap_angle(frame.orientation.yaw() + s.yaw)};
        break;
      }
      case AnchorKind::ee: {
        const Quat local = Quat::from_yaw(s.yaw) * Quat::from_axis_angle({0, 1, 0}, s.pitch);
        a.goal = EeGoal{frame * Pose3{s.offset, local}};
        break;
      }
      case AnchorKind::config: a.goal = ConfigGoal{s.q}; break;
      case AnchorKind::gripper: a.goal = GripperCommand{s.close}; break;
    }
    out.push_back(a);
  }
  return out;
}

const std::vector<AnchorTemplate>& default_anchor_templates() {
  static const std::vector<AnchorTemplate> templates = [] {
    const double face = -kPi / 2.0;  // looking into the fixture
    auto base = [&](double standoff) {
      AnchorStep s;
      s.kind = AnchorKind::base;
      s.frame = AnchorFrame::front;
      s.offset = {0.0, standoff, 0.0};
      s.yaw = face;
      s.noise = {0.02, 0.03, 0.0};
      return s;
    };
    auto ee = [&](Vec3 offset, double noise) {
      AnchorStep s;
      s.kind = AnchorKind::ee;
      s.frame = AnchorFrame::item;
      s.offset = offset;
      s.yaw = face;
      s.noise = {noise, 0.0, 0.0};
      return s;
    };
    auto grip = [](bool close) {
      AnchorStep s;
      s.kind = AnchorKind::gripper;
      s.frame = AnchorFrame::world;
      s.close = close;
      return s;
    };
    std::vector<AnchorTemplate> v;
    // Approach, pre-grasp, grasp, lift, retreat.
    v.push_back({"pick",
                 {base(0.62), grip(false), ee({0.0, 0.14, 0.0}, 0.005), ee({0.0, 0.0, 0.0}, 0.0), grip(true),
                  ee({0.0, 0.0, 0.03}, 0.0), ee({0.0, 0.18, 0.03}, 0.0)}});
    // Same as pick; the basket drop is judged by task evaluation only.
    v.push_back({"pick_to_basket",
                 {base(0.62), grip(false), ee({0.0, 0.14, 0.0}, 0.005), ee({0.0, 0.0, 0.0}, 0.0), grip(true),
                  ee({0.0, 0.0, 0.03}, 0.0), ee({0.0, 0.18, 0.03}, 0.0)}});
    // Place onto a board: carry in above the target, lower, release, retreat.
    v.push_back({"board_to_board",
                 {base(0.62), ee({0.0, 0.14, 0.03}, 0.005), ee({0.0, 0.0, 0.03}, 0.0), ee({0.0, 0.0, 0.0}, 0.0),
                  grip(false), ee({0.0, 0.18, 0.0}, 0.0)}});
    return v;
  }();
  return templates;
}

const AnchorTemplate& find_anchor_template(const std::string& task) {
  for (const auto& t : default_anchor_templates()) {
    if (t.task == task) return t;
  }
  throw Error(ErrorCode::config_error, "unknown anchor template '" + task + "'");
}

// ---------------------------------------------------------------------------
// Pick suite

std::optional<Config> sample_pick_start(const SceneFile& scene, const Item& target, const RobotModel& model,
                                        double start_distance, Rng& rng) {
  const CollisionScene obstacles(scene_obstacles(scene, {target.instance_id}));
  const AnchorTarget at = anchor_target(scene, target);
  // Somewhere in the aisle in front of the target, facing anywhere.
  for (int attempt = 0; attempt < 50; ++attempt) {
    const Vec3 p = at.front.transform({rng.uniform(-0.5, 0.5), start_distance + rng.uniform(-0.2, 0.2), 0.0});
    Config q{};
    q[0] = p.x;
    q[1] = p.y;
    q[2] = wrap_angle(at.front.orientation.yaw() + rng.uniform(-kPi, kPi));
    q = with_manip(q, model.stow);
    if (!config_in_collision(model, q, obstacles)) return q;
  }
  return std::nullopt;
}

std::optional<PickTrial> make_pick_trial(std::uint64_t seed, const RobotModel& model, const PickSuiteParams& params) {
  const StoreSpec store = StoreSpec::rectangle(params.store_width, params.store_depth);
  LayoutParams lp;
  lp.seed = derive_seed(seed, "trial/layout");
  lp.passage_width = 1.6;
  const Layout layout = generate_layout(store, default_fixture_templates(), lp, default_texture_catalog());
  ArrangeParams ap;
  ap.seed = derive_seed(seed, "trial/arrange");
  const Arrangement arr = arrange_store(layout, default_product_catalog(), {}, ap);

  PickTrial trial;
  trial.scene = scene_from_layout(layout, seed, scenario_preset("in_domain"));
  trial.scene.arrangement = arr;
  trial.scene.products = default_product_catalog();

  // Front, top-level items on shelves.
  std::vector<const Item*> candidates;
  for (const Item& it : arr.items) {
    const Lane& lane = arr.lanes[it.lane];
    const BoardSurface& surf = arr.surfaces[lane.surface];
    const FixturePlacement* fx = layout.find(surf.fixture_id);
    if (!fx || layout.template_of(*fx).kind != FixtureKind::shelf) continue;
    if (it.slot != 0 || it.level != lane.levels - 1) continue;
    if (lane.occupancy.empty() || lane.occupancy[0] != lane.levels) continue;
    candidates.push_back(&it);
  }
  if (candidates.empty()) return std::nullopt;
  Rng rng(derive_seed(seed, "trial/target"));
  const Item& target = *candidates[rng.below(candidates.size())];
  trial.target_instance = target.instance_id;

  if (auto start = sample_pick_start(trial.scene, target, model, params.start_distance, rng)) {
    trial.start = *start;
    return trial;
  }
  return std::nullopt;
}

}  // namespace darkstore
