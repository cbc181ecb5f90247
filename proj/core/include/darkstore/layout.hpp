#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darkstore/geometry.hpp"
#include "darkstore/rng.hpp"
#include "darkstore/tensor_field.hpp"

namespace darkstore {

struct DoorSegment {
  std::string id;
  Vec2 a;
  Vec2 b;
  bool operator==(const DoorSegment&) const = default;
};

struct StoreSpec {
  double width = 20.0;  // x extent
  double depth = 15.0;  // y extent
  Polygon walls;
  std::vector<DoorSegment> doors;

  // N x M rectangle with one door centred on the y = 0 wall.
  static StoreSpec rectangle(double width, double depth, double door_width = 1.2);
  Rect bounds() const { return walls.bounds(); }
  bool operator==(const StoreSpec&) const = default;
};

enum class FixtureKind { shelf, fridge, showcase, pallet, box };

std::string_view to_string(FixtureKind kind);
FixtureKind fixture_kind_from_string(std::string_view s);

// A board in the fixture frame. Fixture frame: origin at the footprint centre
// on the floor, +x along the length, +y towards the open front.
struct Board {
  int index = 0;
  double z = 0.0;
  Rect usable;
  // Free height to the next board (or declared headroom for the top board).
  // nullopt on a top board without declared headroom: not a placement surface.
  std::optional<double> gap_to_next;
  bool operator==(const Board&) const = default;
};

struct FixtureTemplate {
  std::string id;
  FixtureKind kind = FixtureKind::shelf;
  Vec2 half_extents;
  double height = 0.0;
  double panel_thickness = 0.02;
  std::vector<Board> boards;
  bool operator==(const FixtureTemplate&) const = default;

  bool has_boards() const { return !boards.empty(); }
  // Throws invalid_parameter when an invariant is broken.
  void validate() const;
};

enum class Provenance { seeded, horizontal_pass, vertical_pass };
std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct FixturePlacement {
  std::string id;
  std::string template_id;
  Vec2 center;
  double yaw = 0.0;
  Provenance provenance = Provenance::seeded;
  bool operator==(const FixturePlacement&) const = default;
};

struct LayoutParams {
  double passage_width = 1.2;
  double skip_prob = 0.15;
  int max_attempts = 100;
  int n_seed_fixtures = 3;
  double angle_tol = 15.0 * kPi / 180.0;
  std::uint64_t seed = 0;
  double max_edge = 1.0;        // polygon resampling length D
  double decay = 0.4;           // tensor weight decay d, 1/m
  double field_resolution = 0.25;
  double nav_resolution = 0.25;
  double fixture_gap = 0.02;    // minimal spacing between footprints
  bool back_to_back = true;
  bool rebuild_field_between_passes = false;
  bool operator==(const LayoutParams&) const = default;

  void validate() const;
};

struct TextureIds {
  std::string floor;
  std::string wall;
  std::string ceiling;
  bool operator==(const TextureIds&) const = default;
};

struct TextureCatalog {
  std::vector<std::string> floor;
  std::vector<std::string> wall;
  std::vector<std::string> ceiling;
  bool operator==(const TextureCatalog&) const = default;
};

struct Layout {
  StoreSpec store;
  std::vector<FixtureTemplate> templates;
  std::vector<FixturePlacement> placements;
  TensorField field;
  TextureIds textures;
  LayoutParams params;

  const FixtureTemplate& template_of(const FixturePlacement& p) const;
  const FixturePlacement* find(std::string_view id) const;
};

const FixtureTemplate& find_template(const std::vector<FixtureTemplate>& templates,
                                     std::string_view id);

Obb2 footprint(const FixtureTemplate& tmpl, const FixturePlacement& p);
// Aisle zone of depth passage_width in front of the fixture.
Obb2 front_zone(const FixtureTemplate& tmpl, const FixturePlacement& p, double passage_width);
// Boards, panels and solid bodies as boxes, for the planner.
std::vector<Obb3> fixture_obstacles(const FixtureTemplate& tmpl, const FixturePlacement& p);
Pose3 fixture_pose(const FixturePlacement& p);

// Free-space lattice used for navigability. A cell is free when its centre is
// inside the walls and at least passage_width / 2 away from walls and
// fixtures.
class NavGrid {
 public:
  NavGrid(const StoreSpec& store, double resolution, double passage_width);

  void add_obstacle(const Obb2& box);
  bool free(std::size_t i, std::size_t j) const { return clearance_[j * nx_ + i] >= required_; }
  double clearance(std::size_t i, std::size_t j) const { return clearance_[j * nx_ + i]; }
  Vec2 cell_center(std::size_t i, std::size_t j) const {
    return {origin_.x + (static_cast<double>(i) + 0.5) * resolution_,
            origin_.y + (static_cast<double>(j) + 0.5) * resolution_};
  }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double resolution() const { return resolution_; }

  // 4-connected component labels of free cells, -1 on blocked cells.
  std::vector<int> components(int* count = nullptr) const;

 private:
  Vec2 origin_;
  double resolution_;
  double required_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> clearance_;
};

struct Violation {
  enum class Kind { overlap, containment, connectivity };
  Kind kind;
  std::vector<std::string> ids;
  std::string detail;
};

std::string_view to_string(Violation::Kind kind);

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Pairwise non-overlap, wall containment and free-space connectivity from the
// doors to every fixture front.
ValidationReport validate_layout(const Layout& layout, const LayoutParams& params);
ValidationReport validate_placements(const StoreSpec& store,
                                     const std::vector<FixtureTemplate>& templates,
                                     const std::vector<FixturePlacement>& placements,
                                     const LayoutParams& params);

struct SeedingResult {
  std::vector<FixturePlacement> placements;
  int requested = 0;
  int attempts = 0;
};

SeedingResult seed_fixtures(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                            const LayoutParams& params, Rng& rng);

enum class PassAxis { horizontal, vertical };

struct PassStats {
  int lattice_points = 0;
  int aligned = 0;     // direction within angle_tol of the pass axis
  int feasible = 0;    // accepted candidates before skipping
  int skipped = 0;
  int placed = 0;      // fixtures added (a back-to-back pair counts two)
};

// Builds the tensor field from walls and the given fixtures.
TensorField layout_field(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                         const std::vector<FixturePlacement>& placements,
                         const LayoutParams& params);

// Appends shelves placed along the pass axis to placements.
PassStats place_pass(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                     const TensorField& field, std::vector<FixturePlacement>& placements,
                     PassAxis axis, const LayoutParams& params, Rng& rng);

struct LayoutStats {
  SeedingResult seeding;
  PassStats horizontal;
  PassStats vertical;
};

Layout generate_layout(const StoreSpec& store, const std::vector<FixtureTemplate>& templates,
                       const LayoutParams& params, const TextureCatalog& textures,
                       LayoutStats* stats = nullptr);

}  // namespace darkstore
