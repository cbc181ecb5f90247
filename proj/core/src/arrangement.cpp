#include "darkstore/arrangement.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "darkstore/error.hpp"

namespace darkstore {

void ProductSpec::validate() const {
  if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "product '" + id + "': dims must be positive");
  }
  if (max_stack < 1) throw Error(ErrorCode::invalid_parameter, "product '" + id + "': max_stack must be >= 1");
  if (!stackable && max_stack != 1) {
    throw Error(ErrorCode::invalid_parameter, "product '" + id + "': non-stackable products have max_stack 1");
  }
}

void ArrangeParams::validate() const {
  if (!(gap >= 0.0) || !(jitter_pos >= 0.0) || !(jitter_yaw >= 0.0) || !(depletion_rate >= 0.0) ||
      !(margin >= 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "arrange parameters must be non-negative");
  }
}

int Lane::stock() const {
  int n = 0;
  for (int o : occupancy) n += o;
  return n;
}

bool front_suffix_ok(const Lane& lane) {
  // Empty slots, at most one partial stack, then full stacks.
  bool seen = false;
  for (int o : lane.occupancy) {
    if (o < 0 || o > lane.levels) return false;
    if (seen && o != lane.levels) return false;
    if (o > 0) seen = true;
  }
  return true;
}

const Item* Arrangement::find_item(std::string_view instance_id) const {
  for (const auto& it : items) {
    if (it.instance_id == instance_id) return &it;
  }
  return nullptr;
}

const ProductSpec& find_product(const std::vector<ProductSpec>& catalog, std::string_view id) {
  for (const auto& p : catalog) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::invalid_parameter, "unknown product '" + std::string(id) + "'");
}

std::vector<BoardSurface> placement_surfaces(const FixtureTemplate& tmpl, const ProductSpec& product,
                                             double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorCode::invalid_parameter, "placement_surfaces: margin must be >= 0");
  std::vector<BoardSurface> out;
  for (const Board& b : tmpl.boards) {
    if (!b.gap_to_next || *b.gap_to_next < product.dims.z + margin) continue;
    const Rect r = b.usable.shrunk(margin);
    if (!(r.width() > 0.0) || !(r.height() > 0.0)) continue;
    BoardSurface s;
    s.board_index = b.index;
    s.rect = r;
    s.z = b.z;
    s.clearance = *b.gap_to_next - margin;
    out.push_back(s);
  }
  return out;
}

namespace {

std::vector<BoardSurface> board_surfaces(const FixtureTemplate& tmpl, double margin) {
  std::vector<BoardSurface> out;
  for (const Board& b : tmpl.boards) {
    if (!b.gap_to_next || *b.gap_to_next <= margin) continue;
    const Rect r = b.usable.shrunk(margin);
    if (!(r.width() > 0.0) || !(r.height() > 0.0)) continue;
    BoardSurface s;
    s.board_index = b.index;
    s.rect = r;
    s.z = b.z;
    s.clearance = *b.gap_to_next - margin;
    out.push_back(s);
  }
  return out;
}

}  // namespace

Obb2 item_local_footprint(const Item& item, const BoardSurface& surface, const ProductSpec& product) {
  const Pose3 local = surface.frame().inverse() * item.pose;
  return {local.position.xy(), {0.5 * product.dims.x, 0.5 * product.dims.y}, local.orientation.yaw()};
}

std::optional<SurfaceFill> arrange_surface(const BoardSurface& surface, const ProductSpec& product,
                                           const ArrangeParams& params, Rng& rng) {
  params.validate();
  const double pitch_x = product.dims.x + params.gap;
  const double pitch_y = product.dims.y + params.gap;
  const auto n_lanes = static_cast<int>(std::floor(surface.rect.width() / pitch_x + 1e-9));
  const auto n_slots = static_cast<int>(std::floor(surface.rect.height() / pitch_y + 1e-9));
  const int fit_levels = static_cast<int>(std::floor(surface.clearance / product.dims.z + 1e-9));
  if (n_lanes < 1 || n_slots < 1 || fit_levels < 1) return std::nullopt;
  const int levels = std::min(product.stackable ? product.max_stack : 1, fit_levels);

  const double off_x = 0.5 * (surface.rect.width() - n_lanes * pitch_x);
  const double off_y = 0.5 * (surface.rect.height() - n_slots * pitch_y);
  // Jittered footprints stay inside their own cell shrunk by gap/4, which
  // keeps gap/2 between neighbours and keeps every item on the board.
  const double cell_hx = 0.5 * pitch_x - 0.25 * params.gap;
  const double cell_hy = 0.5 * pitch_y - 0.25 * params.gap;
  const double hx = 0.5 * product.dims.x;
  const double hy = 0.5 * product.dims.y;
  const Pose3 frame = surface.frame();

  SurfaceFill fill;
  for (int l = 0; l < n_lanes; ++l) {
    Lane lane;
    lane.product_id = product.id;
    lane.x = surface.rect.min.x + off_x + (l + 0.5) * pitch_x;
    lane.levels = levels;
    for (int s = 0; s < n_slots; ++s) {
      lane.slots.push_back(surface.rect.max.y - off_y - (s + 0.5) * pitch_y);
      lane.occupancy.push_back(levels);
    }
    const std::size_t lane_index = fill.lanes.size();
    for (int s = 0; s < n_slots; ++s) {
      for (int level = 0; level < levels; ++level) {
        double dx = 0.0, dy = 0.0, dyaw = 0.0;
        if (params.jitter_pos > 0.0 || params.jitter_yaw > 0.0) {
          bool accepted = false;
          for (int attempt = 0; attempt < params.jitter_retries && !accepted; ++attempt) {
            const double cx = rng.normal(0.0, params.jitter_pos);
            const double cy = rng.normal(0.0, params.jitter_pos);
            const double cyaw = rng.normal(0.0, params.jitter_yaw);
            const double c = std::abs(std::cos(cyaw));
            const double sn = std::abs(std::sin(cyaw));
            const double ex = c * hx + sn * hy;
            const double ey = sn * hx + c * hy;
            if (std::abs(cx) + ex <= cell_hx && std::abs(cy) + ey <= cell_hy) {
              dx = cx;
              dy = cy;
              dyaw = cyaw;
              accepted = true;
            }
          }
        }
        Item item;
        item.product_id = product.id;
        item.lane = lane_index;
        item.slot = s;
        item.level = level;
        const Pose3 local{{lane.x + dx, lane.slots[static_cast<std::size_t>(s)] + dy,
                           surface.z + level * product.dims.z},
                          Quat::from_yaw(dyaw)};
        item.pose = frame * local;
        fill.items.push_back(item);
      }
    }
    fill.lanes.push_back(std::move(lane));
  }
  return fill;
}

Arrangement arrange_store(const Layout& layout, const std::vector<ProductSpec>& catalog,
                          const AssignmentPolicy& policy, const ArrangeParams& params) {
  params.validate();
  if (catalog.empty()) throw Error(ErrorCode::invalid_parameter, "arrange_store: empty catalog");
  if (policy.facings_min < 1 || policy.facings_max < policy.facings_min) {
    throw Error(ErrorCode::invalid_parameter, "arrange_store: invalid facings range");
  }
  std::set<std::string> category_set;
  for (const auto& p : catalog) {
    p.validate();
    if (policy.categories.empty() ||
        std::find(policy.categories.begin(), policy.categories.end(), p.category) != policy.categories.end()) {
      category_set.insert(p.category);
    }
  }
  std::vector<std::string> categories(category_set.begin(), category_set.end());
  Rng cat_rng(derive_seed(params.seed, "arrange/categories"));
  for (std::size_t i = categories.size(); i > 1; --i) std::swap(categories[i - 1], categories[cat_rng.below(i)]);

  Arrangement arr;
  std::size_t instance = 0;
  std::size_t fixture_rank = 0;
  for (const FixturePlacement& fx : layout.placements) {
    const FixtureTemplate& tmpl = layout.template_of(fx);
    if (!tmpl.has_boards() || categories.empty()) continue;
    const std::string& category = categories[fixture_rank++ % categories.size()];
    std::vector<const ProductSpec*> pool;
    for (const auto& p : catalog) {
      if (p.category == category) pool.push_back(&p);
    }
    Rng rng(derive_seed(params.seed, "arrange/fixture/" + fx.id));

    for (BoardSurface surface : board_surfaces(tmpl, params.margin)) {
      surface.fixture_id = fx.id;
      surface.fixture_center = fx.center;
      surface.fixture_yaw = fx.yaw;
      const std::size_t surface_index = arr.surfaces.size();
      arr.surfaces.push_back(surface);

      double cursor = surface.rect.min.x;
      for (int guard = 0; guard < 256; ++guard) {
        const double remaining = surface.rect.max.x - cursor;
        std::vector<const ProductSpec*> fits;
        for (const ProductSpec* p : pool) {
          if (p->dims.z <= surface.clearance && p->dims.x + params.gap <= remaining + 1e-9 &&
              p->dims.y + params.gap <= surface.rect.height() + 1e-9) {
            fits.push_back(p);
          }
        }
        if (fits.empty()) break;
        const ProductSpec& product = *fits[rng.below(fits.size())];
        const auto facings = static_cast<int>(
            policy.facings_min + rng.below(static_cast<std::uint64_t>(policy.facings_max - policy.facings_min + 1)));
        const double pitch = product.dims.x + params.gap;
        const int lanes_fit = static_cast<int>(std::floor(remaining / pitch + 1e-9));
        const int n = std::min(facings, lanes_fit);
        BoardSurface group = surface;
        group.rect.min.x = cursor;
        group.rect.max.x = cursor + n * pitch;
        auto fill = arrange_surface(group, product, params, rng);
        if (!fill) break;
        const std::size_t lane_base = arr.lanes.size();
        for (Lane& lane : fill->lanes) {
          lane.surface = surface_index;
          arr.lanes.push_back(std::move(lane));
        }
        for (Item& item : fill->items) {
          item.lane += lane_base;
          item.instance_id = "it_" + std::to_string(instance++);
          arr.items.push_back(std::move(item));
        }
        cursor = group.rect.max.x;
      }
    }
  }
  return arr;
}

Arrangement deplete(const Arrangement& arr, double days, double rate, Rng& rng, DepletionStats* stats) {
  if (!(days >= 0.0) || !(rate >= 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "deplete: days and rate must be non-negative");
  }
  const std::uint64_t base = rng.next();
  Arrangement out = arr;
  if (stats) stats->removed_per_lane.assign(arr.lanes.size(), 0);
  if (days == 0.0 || rate == 0.0) return out;

  std::map<std::tuple<std::size_t, int, int>, std::size_t> index;
  for (std::size_t k = 0; k < arr.items.size(); ++k) {
    const Item& it = arr.items[k];
    index[{it.lane, it.slot, it.level}] = k;
  }
  std::vector<bool> removed(arr.items.size(), false);
  for (std::size_t li = 0; li < out.lanes.size(); ++li) {
    Rng lane_rng(derive_seed(base, "lane/" + std::to_string(li)));
    std::uint64_t k = lane_rng.poisson(rate * days);
    Lane& lane = out.lanes[li];
    int taken = 0;
    for (std::size_t s = 0; s < lane.slots.size() && k > 0; ++s) {
      while (k > 0 && lane.occupancy[s] > 0) {
        const int level = lane.occupancy[s] - 1;
        auto found = index.find({li, static_cast<int>(s), level});
        if (found != index.end()) removed[found->second] = true;
        --lane.occupancy[s];
        --k;
        ++taken;
      }
    }
    if (stats) stats->removed_per_lane[li] = taken;
  }
  out.items.clear();
  for (std::size_t k = 0; k < arr.items.size(); ++k) {
    if (!removed[k]) out.items.push_back(arr.items[k]);
  }
  return out;
}

}  // namespace darkstore
