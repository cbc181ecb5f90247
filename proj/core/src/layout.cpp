#include "darkstore/layout.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>

#include "darkstore/error.hpp"

namespace darkstore {

// ---------------------------------------------------------------------------
// Enums and small types

std::string_view to_string(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::shelf: return "shelf";
    case FixtureKind::fridge: return "fridge";
    case FixtureKind::showcase: return "showcase";
    case FixtureKind::pallet: return "pallet";
    case FixtureKind::box: return "box";
  }
  return "shelf";
}

FixtureKind fixture_kind_from_string(std::string_view s) {
  if (s == "shelf") return FixtureKind::shelf;
  if (s == "fridge") return FixtureKind::fridge;
  if (s == "showcase") return FixtureKind::showcase;
  if (s == "pallet") return FixtureKind::pallet;
  if (s == "box") return FixtureKind::box;
  throw Error(ErrorCode::parse_error, "unknown fixture kind '" + std::string(s) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::seeded: return "seeded";
    case Provenance::horizontal_pass: return "horizontal_pass";
    case Provenance::vertical_pass: return "vertical_pass";
  }
  return "seeded";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "seeded") return Provenance::seeded;
  if (s == "horizontal_pass") return Provenance::horizontal_pass;
  if (s == "vertical_pass") return Provenance::vertical_pass;
  throw Error(ErrorCode::parse_error, "unknown provenance '" + std::string(s) + "'");
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::overlap: return "overlap";
    case Violation::Kind::containment: return "containment";
    case Violation::Kind::connectivity: return "connectivity";
  }
  return "overlap";
}

StoreSpec StoreSpec::rectangle(double width, double depth, double door_width) {
  if (!(width > 0.0) || !(depth > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "store dimensions must be positive");
  }
  StoreSpec s;
  s.width = width;
  s.depth = depth;
  s.walls = Polygon::rectangle(width, depth);
  if (door_width > 0.0) {
    const double w = std::min(door_width, width);
    s.doors.push_back({"door_0", {0.5 * (width - w), 0.0}, {0.5 * (width + w), 0.0}});
  }
  return s;
}

void FixtureTemplate::validate() const {
  if (!(half_extents.x > 0.0) || !(half_extents.y > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "fixture template '" + id + "': footprint must be positive");
  }
  for (std::size_t i = 0; i < boards.size(); ++i) {
    if (i > 0 && !(boards[i].z > boards[i - 1].z)) {
      throw Error(ErrorCode::invalid_parameter,
                  "fixture template '" + id + "': board heights must increase");
    }
    if (boards[i].gap_to_next && !(*boards[i].gap_to_next > 0.0)) {
      throw Error(ErrorCode::invalid_parameter, "fixture template '" + id + "': board gaps must be positive");
    }
    if (!boards[i].gap_to_next && i + 1 != boards.size()) {
      throw Error(ErrorCode::invalid_parameter,
                  "fixture template '" + id + "': only the top board may omit its gap");
    }
  }
}

void LayoutParams::validate() const {
  if (!(passage_width > 0.0)) throw Error(ErrorCode::invalid_parameter, "passage_width must be positive");
  if (!(skip_prob >= 0.0 && skip_prob <= 1.0)) {
    throw Error(ErrorCode::invalid_parameter, "skip_prob must lie in [0, 1]");
  }
  if (max_attempts < 1) throw Error(ErrorCode::invalid_parameter, "max_attempts must be at least 1");
  if (n_seed_fixtures < 0) throw Error(ErrorCode::invalid_parameter, "n_seed_fixtures must be >= 0");
  if (!(angle_tol >= 0.0)) throw Error(ErrorCode::invalid_parameter, "angle_tol must be >= 0");
  if (!(max_edge > 0.0)) throw Error(ErrorCode::invalid_parameter, "max_edge must be positive");
  if (!(decay > 0.0)) throw Error(ErrorCode::invalid_parameter, "decay must be positive");
  if (!(field_resolution > 0.0) || !(nav_resolution > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "grid resolutions must be positive");
  }
  if (!(fixture_gap >= 0.0)) throw Error(ErrorCode::invalid_parameter, "fixture_gap must be >= 0");
}

const FixtureTemplate& find_template(const std::vector<FixtureTemplate>& templates,
                                     std::string_view id) {
  for (const auto& t : templates) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::invalid_parameter, "unknown fixture template '" + std::string(id) + "'");
}

const FixtureTemplate& Layout::template_of(const FixturePlacement& p) const {
  return find_template(templates, p.template_id);
}

const FixturePlacement* Layout::find(std::string_view id) const {
  for (const auto& p : placements) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Obb2 footprint(const FixtureTemplate& tmpl, const FixturePlacement& p) {
  return {p.center, tmpl.half_extents, p.yaw};
}

Obb2 front_zone(const FixtureTemplate& tmpl, const FixturePlacement& p, double passage_width) {
  const Vec2 local{0.0, tmpl.half_extents.y + 0.5 * passage_width};
  return {p.center + rotate(local, p.yaw), {tmpl.half_extents.x, 0.5 * passage_width}, p.yaw};
}

Pose3 fixture_pose(const FixturePlacement& p) { return Pose3::from_xy_yaw(p.center, 0.0, p.yaw); }

std::vector<Obb3> fixture_obstacles(const FixtureTemplate& tmpl, const FixturePlacement& p) {
  std::vector<Obb3> out;
  const double hx = tmpl.half_extents.x;
  const double hy = tmpl.half_extents.y;
  const double t = tmpl.panel_thickness;
  auto local_box = [&](Vec2 c, Vec2 half, double z0, double z1) {
    out.push_back({{p.center + rotate(c, p.yaw), half, p.yaw}, z0, z1});
  };
  if (!tmpl.has_boards() || tmpl.kind == FixtureKind::box) {
    local_box({0, 0}, {hx, hy}, 0.0, tmpl.height);
    return out;
  }
  if (tmpl.kind == FixtureKind::pallet) {
    // Solid deck up to the board.
    local_box({0, 0}, {hx, hy}, 0.0, tmpl.boards.front().z);
    return out;
  }
  // Plinth under the lowest board, boards, back and side panels, top.
  local_box({0, 0}, {hx, hy}, 0.0, tmpl.boards.front().z);
  for (std::size_t i = 1; i < tmpl.boards.size(); ++i) {
    const double z = tmpl.boards[i].z;
    local_box({0, 0}, {hx, hy}, z - t, z);
  }
  local_box({0, -hy + 0.5 * t}, {hx, 0.5 * t}, 0.0, tmpl.height);
  local_box({-hx + 0.5 * t, 0}, {0.5 * t, hy}, 0.0, tmpl.height);
  local_box({hx - 0.5 * t, 0}, {0.5 * t, hy}, 0.0, tmpl.height);
  local_box({0, 0}, {hx, hy}, tmpl.height - t, tmpl.height);
  return out;
}

// ---------------------------------------------------------------------------
// Navigability grid

NavGrid::NavGrid(const StoreSpec& store, double resolution, double passage_width)
    : resolution_(resolution), required_(0.5 * passage_width) {
  const Rect b = store.bounds();
  origin_ = b.min;
  nx_ = static_cast<std::size_t>(std::ceil(b.width() / resolution));
  ny_ = static_cast<std::size_t>(std::ceil(b.height() / resolution));
  clearance_.assign(nx_ * ny_, -1.0);
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const Vec2 c = cell_center(i, j);
      if (point_in_polygon(c, store.walls)) clearance_[j * nx_ + i] = store.walls.boundary_distance(c);
    }
  }
}

void NavGrid::add_obstacle(const Obb2& box) {
  // Cells farther than this keep a clearance above the requirement.
  const double reach = box.half_extents.norm() + required_ + resolution_;
  const auto lo_i = static_cast<long>(std::floor((box.center.x - reach - origin_.x) / resolution_));
  const auto hi_i = static_cast<long>(std::ceil((box.center.x + reach - origin_.x) / resolution_));
  const auto lo_j = static_cast<long>(std::floor((box.center.y - reach - origin_.y) / resolution_));
  const auto hi_j = static_cast<long>(std::ceil((box.center.y + reach - origin_.y) / resolution_));
  for (long j = std::max(0L, lo_j); j <= std::min<long>(hi_j, static_cast<long>(ny_) - 1); ++j) {
    for (long i = std::max(0L, lo_i); i <= std::min<long>(hi_i, static_cast<long>(nx_) - 1); ++i) {
      double& c = clearance_[static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i)];
      c = std::min(c, box.signed_distance(cell_center(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
    }
  }
}

std::vector<int> NavGrid::components(int* count) const {
  std::vector<int> label(nx_ * ny_, -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < label.size(); ++start) {
    if (label[start] >= 0 || clearance_[start] < required_) continue;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      const std::size_t i = idx % nx_;
      const std::size_t j = idx / nx_;
      auto visit = [&](std::size_t n) {
        if (label[n] < 0 && clearance_[n] >= required_) {
          label[n] = next;
          stack.push_back(n);
        }
      };
      if (i > 0) visit(idx - 1);
      if (i + 1 < nx_) visit(idx + 1);
      if (j > 0) visit(idx - nx_);
      if (j + 1 < ny_) visit(idx + nx_);
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

namespace {

constexpr double kAccessReachCells = 1.5;

// Free cells from which a robot reaches the target.
std::vector<std::size_t> door_access_cells(const NavGrid& grid, const DoorSegment& door,
                                           double passage_width) {
  const double reach = 0.5 * passage_width + kAccessReachCells * grid.resolution();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      if (grid.free(i, j) && point_segment_distance(grid.cell_center(i, j), door.a, door.b) <= reach) {
        out.push_back(j * grid.nx() + i);
      }
    }
  }
  return out;
}

std::vector<std::size_t> front_access_cells(const NavGrid& grid, const Obb2& fp,
                                            double passage_width) {
  const double reach = 0.5 * passage_width + kAccessReachCells * grid.resolution();
  const double res = grid.resolution();
  const double r = fp.half_extents.norm() + reach + res;
  const Vec2 origin = grid.cell_center(0, 0) - Vec2{0.5 * res, 0.5 * res};
  const long lo_i = std::max(0L, static_cast<long>(std::floor((fp.center.x - r - origin.x) / res)));
  const long hi_i = std::min(static_cast<long>(grid.nx()) - 1,
                             static_cast<long>(std::ceil((fp.center.x + r - origin.x) / res)));
  const long lo_j = std::max(0L, static_cast<long>(std::floor((fp.center.y - r - origin.y) / res)));
  const long hi_j = std::min(static_cast<long>(grid.ny()) - 1,
                             static_cast<long>(std::ceil((fp.center.y + r - origin.y) / res)));
  std::vector<std::size_t> out;
  for (long j = lo_j; j <= hi_j; ++j) {
    for (long i = lo_i; i <= hi_i; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (!grid.free(ui, uj)) continue;
      const Vec2 l = fp.to_local(grid.cell_center(ui, uj));
      if (l.y >= fp.half_extents.y && l.y <= fp.half_extents.y + reach &&
          std::abs(l.x) <= fp.half_extents.x) {
        out.push_back(uj * grid.nx() + ui);
      }
    }
  }
  return out;
}

Vec2 inward_normal(const Polygon& walls, const DoorSegment& door) {
  const Vec2 d = door.b - door.a;
  const double len = d.norm();
  Vec2 n{-d.y / len, d.x / len};
  const Vec2 mid = (door.a + door.b) * 0.5;
  if (!point_in_polygon(mid + n * 1e-3, walls)) n = -n;
  return n;
}

Obb2 door_zone(const Polygon& walls, const DoorSegment& door, double passage_width) {
  const Vec2 d = door.b - door.a;
  const Vec2 n = inward_normal(walls, door);
  const Vec2 mid = (door.a + door.b) * 0.5;
  return {mid + n * (0.5 * passage_width), {0.5 * d.norm(), 0.5 * passage_width}, std::atan2(d.y, d.x)};
}

struct Connectivity {
  bool ok = true;
  std::vector<std::size_t> unreachable;  // indices into the fixture list
  bool door_unreachable = false;
};

Connectivity check_connectivity(const NavGrid& grid, const StoreSpec& store,
                                const std::vector<Obb2>& footprints, double passage_width) {
  Connectivity result;
  const std::vector<int> labels = grid.components();
  std::vector<std::set<int>> fixture_labels(footprints.size());
  for (std::size_t k = 0; k < footprints.size(); ++k) {
    for (std::size_t c : front_access_cells(grid, footprints[k], passage_width)) {
      fixture_labels[k].insert(labels[c]);
    }
  }
  std::set<int> candidates;
  if (!store.doors.empty()) {
    bool first = true;
    for (const DoorSegment& door : store.doors) {
      std::set<int> door_labels;
      for (std::size_t c : door_access_cells(grid, door, passage_width)) door_labels.insert(labels[c]);
      if (first) {
        candidates = door_labels;
        first = false;
      } else {
        std::set<int> kept;
        std::set_intersection(candidates.begin(), candidates.end(), door_labels.begin(),
                              door_labels.end(), std::inserter(kept, kept.begin()));
        candidates = std::move(kept);
      }
    }
    if (candidates.empty()) {
      result.ok = false;
      result.door_unreachable = true;
      for (std::size_t k = 0; k < footprints.size(); ++k) result.unreachable.push_back(k);
      return result;
    }
  } else {
    for (int l : labels) {
      if (l >= 0) candidates.insert(l);
    }
  }
  // Pick the candidate component serving the most fixtures.
  int best_label = -1;
  std::size_t best_count = 0;
  for (int l : candidates) {
    std::size_t n = 0;
    for (const auto& s : fixture_labels) n += s.count(l);
    if (best_label < 0 || n > best_count) {
      best_label = l;
      best_count = n;
    }
  }
  for (std::size_t k = 0; k < footprints.size(); ++k) {
    if (!fixture_labels[k].count(best_label)) result.unreachable.push_back(k);
  }
  result.ok = result.unreachable.empty();
  return result;
}

// Incremental placement state shared by seeding and the shelf passes.
class PlacementState {
 public:
  PlacementState(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                 const LayoutParams& params)
      : store_(store), templates_(templates), params_(params),
        grid_(store, params.nav_resolution, params.passage_width) {
    for (const DoorSegment& d : store_.doors) door_zones_.push_back(door_zone(store_.walls, d, params_.passage_width));
  }

  void load(const std::vector<FixturePlacement>& placements) {
    for (const FixturePlacement& p : placements) commit(p);
  }

  // Geometric checks for shelves: inside the walls, spaced from other
  // footprints, own aisle clear, and not intruding on other aisles.
  bool geometric_ok(const FixtureTemplate& t, const FixturePlacement& p,
                    const std::vector<Obb2>& extra_fp, const std::vector<Obb2>& extra_front) const {
    const Obb2 fp = footprint(t, p);
    if (!obb_inside_polygon(fp, store_.walls)) return false;
    const Obb2 fz = front_zone(t, p, params_.passage_width);
    if (!obb_inside_polygon(fz, store_.walls)) return false;
    const Obb2 spaced = fp.inflated(0.5 * params_.fixture_gap);
    const double reach = fp.half_extents.norm() + params_.passage_width + params_.fixture_gap;
    auto near = [&](const Obb2& other) {
      return (other.center - fp.center).norm() <= reach + other.half_extents.norm();
    };
    auto clashes = [&](const std::vector<Obb2>& fps, const std::vector<Obb2>& fronts) {
      for (std::size_t k = 0; k < fps.size(); ++k) {
        if (!near(fps[k])) continue;
        if (obb_overlap(spaced, fps[k].inflated(0.5 * params_.fixture_gap))) return true;
        if (obb_overlap(fz, fps[k])) return true;
        if (k < fronts.size() && obb_overlap(fp, fronts[k])) return true;
      }
      return false;
    };
    if (clashes(footprints_, fronts_) || clashes(extra_fp, extra_front)) return false;
    for (const Obb2& dz : door_zones_) {
      if (obb_overlap(fp, dz)) return false;
    }
    return true;
  }

  // Seeded fixtures keep a full passage margin from walls and fixtures.
  bool seed_geometric_ok(const FixtureTemplate& t, const FixturePlacement& p) const {
    const Obb2 fp = footprint(t, p);
    const Obb2 margin = fp.inflated(params_.passage_width);
    if (!obb_inside_polygon(margin, store_.walls)) return false;
    for (const Obb2& other : footprints_) {
      if (obb_overlap(margin, other)) return false;
    }
    for (const Obb2& dz : door_zones_) {
      if (obb_overlap(fp, dz)) return false;
    }
    return true;
  }

  bool connectivity_ok(const std::vector<Obb2>& extra) const {
    NavGrid trial = grid_;
    for (const Obb2& b : extra) trial.add_obstacle(b);
    std::vector<Obb2> all = footprints_;
    all.insert(all.end(), extra.begin(), extra.end());
    return check_connectivity(trial, store_, all, params_.passage_width).ok;
  }

  void commit(const FixturePlacement& p) {
    const FixtureTemplate& t = find_template(templates_, p.template_id);
    const Obb2 fp = footprint(t, p);
    footprints_.push_back(fp);
    fronts_.push_back(front_zone(t, p, params_.passage_width));
    grid_.add_obstacle(fp);
  }

 private:
  const StoreSpec& store_;
  const std::vector<FixtureTemplate>& templates_;
  const LayoutParams& params_;
  NavGrid grid_;
  std::vector<Obb2> footprints_;
  std::vector<Obb2> fronts_;
  std::vector<Obb2> door_zones_;
};

std::string placement_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fx_%03zu", index);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_placements(const StoreSpec& store,
                                     const std::vector<FixtureTemplate>& templates,
                                     const std::vector<FixturePlacement>& placements,
                                     const LayoutParams& params) {
  ValidationReport report;
  std::vector<Obb2> fps;
  fps.reserve(placements.size());
  for (const auto& p : placements) fps.push_back(footprint(find_template(templates, p.template_id), p));

  for (std::size_t a = 0; a < fps.size(); ++a) {
    for (std::size_t b = a + 1; b < fps.size(); ++b) {
      if (obb_overlap(fps[a], fps[b])) {
        report.violations.push_back({Violation::Kind::overlap, {placements[a].id, placements[b].id}, "footprints overlap"});
      }
    }
    if (!obb_inside_polygon(fps[a], store.walls)) {
      report.violations.push_back({Violation::Kind::containment, {placements[a].id}, "footprint leaves the walls"});
    }
  }

  NavGrid grid(store, params.nav_resolution, params.passage_width);
  for (const Obb2& fp : fps) grid.add_obstacle(fp);
  const Connectivity conn = check_connectivity(grid, store, fps, params.passage_width);
  if (conn.door_unreachable) {
    std::vector<std::string> ids;
    for (const auto& d : store.doors) ids.push_back(d.id);
    report.violations.push_back({Violation::Kind::connectivity, ids, "no common free component reaches the doors"});
  }
  if (!conn.unreachable.empty() && !conn.door_unreachable) {
    std::vector<std::string> ids;
    for (std::size_t k : conn.unreachable) ids.push_back(placements[k].id);
    report.violations.push_back({Violation::Kind::connectivity, ids, "fixture fronts not reachable from the door"});
  }
  report.ok = report.violations.empty();
  return report;
}

ValidationReport validate_layout(const Layout& layout, const LayoutParams& params) {
  return validate_placements(layout.store, layout.templates, layout.placements, params);
}

// ---------------------------------------------------------------------------
// Seeding

SeedingResult seed_fixtures(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                            const LayoutParams& params, Rng& rng) {
  params.validate();
  SeedingResult result;
  result.requested = params.n_seed_fixtures;
  if (params.n_seed_fixtures == 0) return result;

  std::vector<const FixtureTemplate*> seedable;
  for (const auto& t : templates) {
    if (t.kind != FixtureKind::shelf) seedable.push_back(&t);
  }
  const Rect bounds = store.bounds();
  PlacementState state(store, templates, params);
  if (!seedable.empty()) {
    for (int n = 0; n < params.n_seed_fixtures; ++n) {
      for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        ++result.attempts;
        const FixtureTemplate& t = *seedable[rng.below(seedable.size())];
        FixturePlacement p;
        p.template_id = t.id;
        p.provenance = Provenance::seeded;
        p.center = {rng.uniform(bounds.min.x, bounds.max.x), rng.uniform(bounds.min.y, bounds.max.y)};
        if (t.kind == FixtureKind::fridge || t.kind == FixtureKind::showcase) {
          p.yaw = rng.bernoulli(0.5) ? 0.0 : 0.5 * kPi;
        } else {
          p.yaw = wrap_angle(rng.uniform(0.0, 2.0 * kPi));
        }
        if (!state.seed_geometric_ok(t, p)) continue;
        if (!state.connectivity_ok({footprint(t, p)})) continue;
        p.id = placement_id(result.placements.size());
        state.commit(p);
        result.placements.push_back(p);
        break;
      }
    }
  }
  if (result.placements.empty()) {
    throw Error(ErrorCode::seeding_failed, "seed_fixtures: no collision-free pose found after " +
                                               std::to_string(result.attempts) + " attempts");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Field and passes

TensorField layout_field(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                         const std::vector<FixturePlacement>& placements,
                         const LayoutParams& params) {
  std::vector<Polygon> polys;
  polys.push_back(resample_polygon(store.walls, params.max_edge));
  for (const auto& p : placements) {
    polys.push_back(resample_polygon(footprint(find_template(templates, p.template_id), p).polygon(), params.max_edge));
  }
  return build_field(polys, params.decay, params.field_resolution, store.bounds());
}

PassStats place_pass(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                     const TensorField& field, std::vector<FixturePlacement>& placements,
                     PassAxis axis, const LayoutParams& params, Rng& rng) {
  params.validate();
  PassStats stats;
  std::vector<const FixtureTemplate*> shelves;
  for (const auto& t : templates) {
    if (t.kind == FixtureKind::shelf) shelves.push_back(&t);
  }
  if (shelves.empty() || field.nx() == 0) return stats;

  PlacementState state(store, templates, params);
  state.load(placements);
  const double axis_dir = axis == PassAxis::horizontal ? 0.0 : 0.5 * kPi;
  const Provenance prov = axis == PassAxis::horizontal ? Provenance::horizontal_pass : Provenance::vertical_pass;
  const std::size_t outer = axis == PassAxis::horizontal ? field.ny() : field.nx();
  const std::size_t inner = axis == PassAxis::horizontal ? field.nx() : field.ny();

  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t i = axis == PassAxis::horizontal ? in : o;
      const std::size_t j = axis == PassAxis::horizontal ? o : in;
      const Vec2 at = field.lattice_point(i, j);
      if (!point_in_polygon(at, store.walls)) continue;
      ++stats.lattice_points;
      const auto dir = major_direction(field.eval(at));
      if (!dir) continue;
      if (direction_difference(*dir, axis_dir) > params.angle_tol) continue;
      ++stats.aligned;

      const FixtureTemplate& t = *shelves[rng.below(shelves.size())];
      const Vec2 normal = rotate({0.0, 1.0}, *dir);
      const double offset = t.half_extents.y + 0.5 * params.fixture_gap;

      std::vector<std::vector<FixturePlacement>> options;
      if (params.back_to_back) {
        FixturePlacement a{"", t.id, at + normal * offset, wrap_angle(*dir), prov};
        FixturePlacement b{"", t.id, at - normal * offset, wrap_angle(*dir + kPi), prov};
        options.push_back({a, b});
      }
      const bool flip_first = rng.bernoulli(0.5);
      FixturePlacement s0{"", t.id, at, wrap_angle(*dir + (flip_first ? kPi : 0.0)), prov};
      FixturePlacement s1{"", t.id, at, wrap_angle(*dir + (flip_first ? 0.0 : kPi)), prov};
      options.push_back({s0});
      options.push_back({s1});

      for (const auto& option : options) {
        std::vector<Obb2> fps;
        std::vector<Obb2> fronts;
        bool ok = true;
        for (const auto& p : option) {
          if (!state.geometric_ok(t, p, fps, fronts)) {
            ok = false;
            break;
          }
          fps.push_back(footprint(t, p));
          fronts.push_back(front_zone(t, p, params.passage_width));
        }
        if (!ok || !state.connectivity_ok(fps)) continue;
        ++stats.feasible;
        if (rng.bernoulli(params.skip_prob)) {
          ++stats.skipped;
          break;
        }
        for (auto p : option) {
          p.id = placement_id(placements.size());
          state.commit(p);
          placements.push_back(p);
          ++stats.placed;
        }
        break;
      }
    }
  }
  return stats;
}

Layout generate_layout(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                       const LayoutParams& params, const TextureCatalog& textures,
                       LayoutStats* stats) {
  params.validate();
  if (templates.empty()) throw Error(ErrorCode::invalid_parameter, "generate_layout: no fixture templates");
  for (const auto& t : templates) t.validate();

  Layout layout;
  layout.store = store;
  layout.templates = templates;
  layout.params = params;

  LayoutStats local;
  Rng seed_rng(derive_seed(params.seed, "layout/seed"));
  local.seeding = seed_fixtures(store, templates, params, seed_rng);
  layout.placements = local.seeding.placements;

  layout.field = layout_field(store, templates, layout.placements, params);
  Rng h_rng(derive_seed(params.seed, "layout/horizontal"));
  local.horizontal = place_pass(store, templates, layout.field, layout.placements, PassAxis::horizontal, params, h_rng);

  const TensorField* vertical_field = &layout.field;
  TensorField rebuilt;
  if (params.rebuild_field_between_passes) {
    rebuilt = layout_field(store, templates, layout.placements, params);
    vertical_field = &rebuilt;
  }
  Rng v_rng(derive_seed(params.seed, "layout/vertical"));
  local.vertical = place_pass(store, templates, *vertical_field, layout.placements, PassAxis::vertical, params, v_rng);
  if (params.rebuild_field_between_passes) layout.field = std::move(rebuilt);

  Rng tex_rng(derive_seed(params.seed, "layout/textures"));
  auto pick = [&](const std::vector<std::string>& ids) {
    return ids.empty() ? std::string{} : ids[tex_rng.below(ids.size())];
  };
  layout.textures = {pick(textures.floor), pick(textures.wall), pick(textures.ceiling)};
  if (stats) *stats = local;
  return layout;
}

}  // namespace darkstore
