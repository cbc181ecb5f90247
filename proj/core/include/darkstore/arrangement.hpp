#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darkstore/geometry.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/rng.hpp"

namespace darkstore {

struct ProductSpec {
  std::string id;
  std::string category;
  Vec3 dims;  // x width, y depth, z height
  bool stackable = false;
  int max_stack = 1;
  std::string mesh_ref;
  bool operator==(const ProductSpec&) const = default;

  void validate() const;
};

// Usable board area in the fixture frame. Items face +y (the open front).
struct BoardSurface {
  std::string fixture_id;
  Vec2 fixture_center;
  double fixture_yaw = 0.0;
  int board_index = 0;
  Rect rect;
  double z = 0.0;
  double clearance = 0.0;
  bool operator==(const BoardSurface&) const = default;

  Pose3 frame() const { return Pose3::from_xy_yaw(fixture_center, 0.0, fixture_yaw); }
};

// Front-to-back column of one product. slot 0 is the front.
struct Lane {
  std::size_t surface = 0;
  std::string product_id;
  double x = 0.0;
  std::vector<double> slots;
  std::vector<int> occupancy;
  int levels = 1;
  bool operator==(const Lane&) const = default;

  int stock() const;
};

// Occupied slots form a contiguous run ending at the back of the lane; only
// the frontmost occupied stack may be partial.
bool front_suffix_ok(const Lane& lane);

struct Item {
  std::string instance_id;
  std::string product_id;
  Pose3 pose;  // world pose of the bottom centre
  std::size_t lane = 0;
  int slot = 0;
  int level = 0;
  bool operator==(const Item&) const = default;
};

struct Arrangement {
  std::vector<BoardSurface> surfaces;
  std::vector<Lane> lanes;
  std::vector<Item> items;
  bool operator==(const Arrangement&) const = default;

  const Item* find_item(std::string_view instance_id) const;
};

struct ArrangeParams {
  double gap = 0.03;
  double jitter_pos = 0.005;
  double jitter_yaw = 3.0 * kPi / 180.0;
  double depletion_rate = 0.35;  // items per lane per day
  double margin = 0.01;          // surface shrink and headroom
  int jitter_retries = 20;
  std::uint64_t seed = 0;
  bool operator==(const ArrangeParams&) const = default;

  void validate() const;
};

struct AssignmentPolicy {
  int facings_min = 2;
  int facings_max = 4;
  // Restricts the category pool; empty means every catalog category.
  std::vector<std::string> categories;
  bool operator==(const AssignmentPolicy&) const = default;
};

// One surface per board whose gap leaves room for the product plus margin.
std::vector<BoardSurface> placement_surfaces(const FixtureTemplate& tmpl, const ProductSpec& product,
                                             double margin);

struct SurfaceFill {
  std::vector<Lane> lanes;   // surface index left at 0
  std::vector<Item> items;   // lane indices relative to `lanes`, ids empty
};

// Grid placement with clipped jitter and stacking. nullopt when the product
// does not fit the surface.
std::optional<SurfaceFill> arrange_surface(const BoardSurface& surface, const ProductSpec& product,
                                           const ArrangeParams& params, Rng& rng);

// Local footprint of an item on its surface: centre, half extents and yaw in
// the fixture frame.
Obb2 item_local_footprint(const Item& item, const BoardSurface& surface, const ProductSpec& product);

Arrangement arrange_store(const Layout& layout, const std::vector<ProductSpec>& catalog,
                          const AssignmentPolicy& policy, const ArrangeParams& params);

struct DepletionStats {
  std::vector<int> removed_per_lane;
};

// Removes Poisson(rate * days) items per lane, front slot first and top of
// stack first. Surviving items keep their poses.
Arrangement deplete(const Arrangement& arr, double days, double rate, Rng& rng,
                    DepletionStats* stats = nullptr);

const ProductSpec& find_product(const std::vector<ProductSpec>& catalog, std::string_view id);

}  // namespace darkstore
