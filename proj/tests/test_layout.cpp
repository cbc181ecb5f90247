#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "darkstore/catalog.hpp"
#include "darkstore/error.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/scene.hpp"
#include "darkstore/io.hpp"
#include "oracles.hpp"

using namespace darkstore;

namespace {

LayoutParams params_with_seed(std::uint64_t seed) {
  LayoutParams p;
  p.seed = seed;
  return p;
}

std::vector<FixtureTemplate> shelf_only() {
  return {find_template(default_fixture_templates(), "shelf_c")};
}

std::vector<Vec2> corners_of(const Obb2& b) { return oracle::box_corners(b); }

// Every footprint corner lies inside the walls (touching allowed) and no two
// footprints share positive area.
void expect_pairwise_clear(const Layout& layout) {
  std::vector<Vec2> walls(layout.store.walls.vertices().begin(), layout.store.walls.vertices().end());
  std::vector<Obb2> fps;
  for (const auto& p : layout.placements) fps.push_back(footprint(layout.template_of(p), p));
  for (std::size_t i = 0; i < fps.size(); ++i) {
    for (Vec2 c : corners_of(fps[i])) {
      EXPECT_TRUE(oracle::winding_number(c, walls) != 0 || oracle::boundary_distance(c, walls) < 1e-9);
    }
    for (std::size_t j = i + 1; j < fps.size(); ++j) {
      EXPECT_LT(oracle::overlap_area(fps[i], fps[j]), 1e-9)
          << layout.placements[i].id << " " << layout.placements[j].id;
    }
  }
}

// Flood fill over free cells from the door; a fixture is reachable when a
// reached cell sits in the band in front of it.
struct FloodOracle {
  std::size_t nx = 0, ny = 0;
  double res = 0.25;
  Vec2 origin;
  std::vector<char> free_cell, reached;

  FloodOracle(const StoreSpec& store, const std::vector<Obb2>& fps, double passage, const DoorSegment& door) {
    const Rect b = store.bounds();
    origin = b.min;
    nx = static_cast<std::size_t>(std::ceil((b.max.x - b.min.x) / res));
    ny = static_cast<std::size_t>(std::ceil((b.max.y - b.min.y) / res));
    std::vector<Vec2> walls(store.walls.vertices().begin(), store.walls.vertices().end());
    free_cell.assign(nx * ny, 0);
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const Vec2 c = center(i, j);
        if (oracle::winding_number(c, walls) == 0) continue;
        double d = oracle::boundary_distance(c, walls);
        for (const Obb2& f : fps) {
          const auto poly = oracle::box_corners(f);
          d = oracle::winding_number(c, poly) != 0 ? 0.0 : std::min(d, oracle::boundary_distance(c, poly));
          if (d == 0.0) break;
        }
        free_cell[j * nx + i] = d >= 0.5 * passage;
      }
    }
    reached.assign(nx * ny, 0);
    std::deque<std::size_t> q;
    for (std::size_t k = 0; k < nx * ny; ++k) {
      const Vec2 c = center(k % nx, k / nx);
      if (free_cell[k] && point_segment_distance(c, door.a, door.b) <= 0.5 * passage + 2 * res) {
        reached[k] = 1;
        q.push_back(k);
      }
    }
    while (!q.empty()) {
      const std::size_t k = q.front();
      q.pop_front();
      const std::size_t i = k % nx, j = k / nx;
      const long di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int n = 0; n < 4; ++n) {
        const long a = static_cast<long>(i) + di[n], c = static_cast<long>(j) + dj[n];
        if (a < 0 || c < 0 || a >= static_cast<long>(nx) || c >= static_cast<long>(ny)) continue;
        const std::size_t m = static_cast<std::size_t>(c) * nx + static_cast<std::size_t>(a);
        if (free_cell[m] && !reached[m]) {
          reached[m] = 1;
          q.push_back(m);
        }
      }
    }
  }

  Vec2 center(std::size_t i, std::size_t j) const {
    return {origin.x + (i + 0.5) * res, origin.y + (j + 0.5) * res};
  }

  bool front_reached(const Obb2& f, double passage) const {
    for (std::size_t k = 0; k < nx * ny; ++k) {
      if (!reached[k]) continue;
      const Vec2 l = rotate(center(k % nx, k / nx) - f.center, -f.yaw);
      if (std::abs(l.x) <= f.half_extents.x && l.y >= f.half_extents.y &&
          l.y <= f.half_extents.y + 0.5 * passage + 2 * res) {
        return true;
      }
    }
    return false;
  }
};

}  // namespace

TEST(Seeding, NoneRequested) {
  LayoutParams p;
  p.n_seed_fixtures = 0;
  Rng rng(1);
  const auto r = seed_fixtures(StoreSpec::rectangle(20, 15), default_fixture_templates(), p, rng);
  EXPECT_TRUE(r.placements.empty());
}

TEST(Seeding, OneInLargeStore) {
  LayoutParams p;
  p.n_seed_fixtures = 1;
  Rng rng(2);
  const StoreSpec store = StoreSpec::rectangle(30, 30);
  const auto r = seed_fixtures(store, default_fixture_templates(), p, rng);
  ASSERT_EQ(r.placements.size(), 1u);
  const Obb2 fp = footprint(find_template(default_fixture_templates(), r.placements[0].template_id), r.placements[0]);
  EXPECT_TRUE(obb_inside_polygon(fp, store.walls));
  EXPECT_EQ(r.placements[0].provenance, Provenance::seeded);
}

TEST(Seeding, FiveSeedsKeepPassageMargin) {
  LayoutParams p;
  p.n_seed_fixtures = 5;
  const StoreSpec store = StoreSpec::rectangle(20, 15);
  const auto& templates = default_fixture_templates();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto r = seed_fixtures(store, templates, p, rng);
    ASSERT_LE(r.placements.size(), 5u);
    ASSERT_GE(r.placements.size(), 1u);
    for (std::size_t i = 0; i < r.placements.size(); ++i) {
      const auto& ti = find_template(templates, r.placements[i].template_id);
      EXPECT_NE(ti.kind, FixtureKind::shelf);
      const Obb2 a = footprint(ti, r.placements[i]);
      for (std::size_t j = i + 1; j < r.placements.size(); ++j) {
        const Obb2 b = footprint(find_template(templates, r.placements[j].template_id), r.placements[j]);
        EXPECT_GE(oracle::box_gap(a, b), p.passage_width - 1e-9) << "seed " << seed;
        EXPECT_FALSE(obb_overlap(a, b));
      }
    }
  }
}

TEST(Seeding, YawConvention) {
  LayoutParams p;
  p.n_seed_fixtures = 5;
  const auto& templates = default_fixture_templates();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    for (const auto& pl : seed_fixtures(StoreSpec::rectangle(20, 15), templates, p, rng).placements) {
      const FixtureKind k = find_template(templates, pl.template_id).kind;
      if (k == FixtureKind::fridge || k == FixtureKind::showcase) {
        EXPECT_TRUE(pl.yaw == 0.0 || pl.yaw == 0.5 * kPi);
      }
    }
  }
}

TEST(Seeding, ImpossibleStoreFails) {
  LayoutParams p;
  p.n_seed_fixtures = 2;
  p.max_attempts = 10;
  Rng rng(3);
  try {
    seed_fixtures(StoreSpec::rectangle(1.5, 1.5, 0.8), default_fixture_templates(), p, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::seeding_failed);
  }
}

TEST(Passes, SkipAllPlacesNothing) {
  LayoutParams p = params_with_seed(4);
  p.skip_prob = 1.0;
  LayoutStats stats;
  const Layout l = generate_layout(StoreSpec::rectangle(20, 15), default_fixture_templates(), p,
                                   default_texture_catalog(), &stats);
  EXPECT_EQ(stats.horizontal.placed + stats.vertical.placed, 0);
  for (const auto& pl : l.placements) EXPECT_EQ(pl.provenance, Provenance::seeded);
}

TEST(Passes, DegenerateFieldPlacesNothing) {
  const StoreSpec store = StoreSpec::rectangle(20, 15);
  const TensorField zero({}, 0.4, 0.5, store.bounds());
  std::vector<FixturePlacement> placements;
  Rng rng(5);
  const PassStats s = place_pass(store, default_fixture_templates(), zero, placements, PassAxis::horizontal,
                                 LayoutParams{}, rng);
  EXPECT_EQ(s.placed, 0);
  EXPECT_EQ(s.aligned, 0);
  EXPECT_TRUE(placements.empty());
}

TEST(Passes, OrientationFollowsAxis) {
  const StoreSpec store = StoreSpec::rectangle(20, 15);
  int horizontal = 0, vertical = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const LayoutParams p = params_with_seed(seed);
    const Layout l = generate_layout(store, default_fixture_templates(), p, default_texture_catalog());
    for (const auto& pl : l.placements) {
      if (pl.provenance == Provenance::horizontal_pass) {
        ++horizontal;
        EXPECT_LE(direction_difference(pl.yaw, 0.0), p.angle_tol + 1e-12);
      } else if (pl.provenance == Provenance::vertical_pass) {
        ++vertical;
        EXPECT_LE(direction_difference(pl.yaw, 0.5 * kPi), p.angle_tol + 1e-12);
      }
    }
  }
  EXPECT_GT(horizontal, 0);
  EXPECT_GT(vertical, 0);
}

TEST(Generate, Deterministic) {
  const LayoutParams p = params_with_seed(42);
  const SceneFile a = scene_from_layout(
      generate_layout(StoreSpec::rectangle(20, 15), default_fixture_templates(), p, default_texture_catalog()), 42, {});
  const SceneFile b = scene_from_layout(
      generate_layout(StoreSpec::rectangle(20, 15), default_fixture_templates(), p, default_texture_catalog()), 42, {});
  EXPECT_EQ(serialize_scene(a), serialize_scene(b));
}

TEST(Generate, HundredSeedsValidate) {
  const StoreSpec store = StoreSpec::rectangle(20, 15);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const LayoutParams p = params_with_seed(seed);
    const Layout l = generate_layout(store, default_fixture_templates(), p, default_texture_catalog());
    const ValidationReport r = validate_layout(l, p);
    EXPECT_TRUE(r.ok) << "seed " << seed;
    expect_pairwise_clear(l);
    EXPECT_FALSE(l.textures.floor.empty());
  }
}

TEST(Generate, SmallStoreHoldsAtMostTwoShelves) {
  // A 2 x 0.6 m shelf plus its 1.2 m aisle takes 1.8 m of depth, so at
  // most two rows fit 4 m in either direction and each row holds one shelf
  // (two would need 4 m plus their spacing).
  const StoreSpec store = StoreSpec::rectangle(4, 4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    LayoutParams p = params_with_seed(seed);
    p.n_seed_fixtures = 0;
    p.skip_prob = 0.0;
    const Layout l = generate_layout(store, shelf_only(), p, default_texture_catalog());
    EXPECT_LE(l.placements.size(), 2u);
    EXPECT_TRUE(validate_layout(l, p).ok);
    expect_pairwise_clear(l);
  }
}

TEST(Generate, VerticalPassKeepsHorizontalPlacements) {
  const StoreSpec store = StoreSpec::rectangle(20, 15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LayoutParams p = params_with_seed(seed);
    Rng seed_rng(derive_seed(p.seed, "layout/seed"));
    std::vector<FixturePlacement> placements =
        seed_fixtures(store, default_fixture_templates(), p, seed_rng).placements;
    const TensorField field = layout_field(store, default_fixture_templates(), placements, p);
    Rng h(derive_seed(p.seed, "layout/horizontal"));
    place_pass(store, default_fixture_templates(), field, placements, PassAxis::horizontal, p, h);
    const auto before = placements;
    Rng v(derive_seed(p.seed, "layout/vertical"));
    place_pass(store, default_fixture_templates(), field, placements, PassAxis::vertical, p, v);
    ASSERT_GE(placements.size(), before.size());
    for (std::size_t k = 0; k < before.size(); ++k) EXPECT_EQ(placements[k], before[k]);

    // The staged run equals the pipeline.
    const Layout l = generate_layout(store, default_fixture_templates(), p, default_texture_catalog());
    EXPECT_EQ(l.placements, placements);
  }
}

TEST(Generate, SkippingIsBinomial) {
  const StoreSpec store = StoreSpec::rectangle(12, 10);
  for (double s : {0.25, 0.5}) {
    long feasible = 0, skipped = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      LayoutParams p = params_with_seed(seed);
      p.skip_prob = s;
      LayoutStats st;
      generate_layout(store, default_fixture_templates(), p, default_texture_catalog(), &st);
      feasible += st.horizontal.feasible + st.vertical.feasible;
      skipped += st.horizontal.skipped + st.vertical.skipped;
    }
    ASSERT_GT(feasible, 100);
    const double mean = feasible * s, var = feasible * s * (1 - s);
    const double chi2 = (skipped - mean) * (skipped - mean) / var;
    EXPECT_LT(chi2, 6.635) << "s=" << s << " feasible=" << feasible << " skipped=" << skipped;
  }
}

TEST(Validate, EmptyLayoutOk) {
  const StoreSpec store = StoreSpec::rectangle(10, 8);
  EXPECT_TRUE(validate_placements(store, default_fixture_templates(), {}, LayoutParams{}).ok);
}

TEST(Validate, OverlapNamesBothFixtures) {
  const StoreSpec store = StoreSpec::rectangle(10, 8);
  std::vector<FixturePlacement> pl = {{"a", "shelf_a", {5, 4}, 0.0, Provenance::seeded},
                                      {"b", "shelf_a", {5.3, 4.1}, 0.0, Provenance::seeded}};
  const auto r = validate_placements(store, default_fixture_templates(), pl, LayoutParams{});
  EXPECT_FALSE(r.ok);
  bool found = false;
  for (const auto& v : r.violations) {
    if (v.kind == Violation::Kind::overlap) {
      found = true;
      EXPECT_EQ(v.ids, (std::vector<std::string>{"a", "b"}));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Validate, OutsideWalls) {
  const StoreSpec store = StoreSpec::rectangle(10, 8);
  std::vector<FixturePlacement> pl = {{"a", "shelf_a", {0.2, 4}, 0.0, Provenance::seeded}};
  const auto r = validate_placements(store, default_fixture_templates(), pl, LayoutParams{});
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::containment);
}

TEST(Validate, BlockedCornerShelf) {
  const StoreSpec store = StoreSpec::rectangle(6, 6);
  const LayoutParams params;
  const auto& templates = default_fixture_templates();
  // The corner shelf faces -y; a second shelf 0.15 m in front of it leaves
  // no passage to its front face.
  const FixturePlacement corner{"corner", "shelf_c", {1.05, 5.65}, kPi, Provenance::seeded};
  const FixturePlacement blocker{"blocker", "shelf_c", {1.3, 4.9}, kPi, Provenance::seeded};

  const std::vector<Obb2> open_fps = {footprint(find_template(templates, "shelf_c"), corner)};
  const FloodOracle open(store, open_fps, params.passage_width, store.doors[0]);
  EXPECT_TRUE(open.front_reached(open_fps[0], params.passage_width));
  EXPECT_TRUE(validate_placements(store, templates, {corner}, params).ok);

  const std::vector<Obb2> fps = {open_fps[0], footprint(find_template(templates, "shelf_c"), blocker)};
  const FloodOracle blocked(store, fps, params.passage_width, store.doors[0]);
  EXPECT_FALSE(blocked.front_reached(fps[0], params.passage_width));
  EXPECT_TRUE(blocked.front_reached(fps[1], params.passage_width));

  const auto r = validate_placements(store, templates, {corner, blocker}, params);
  ASSERT_FALSE(r.ok);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::connectivity);
  EXPECT_EQ(r.violations[0].ids, (std::vector<std::string>{"corner"}));
}

TEST(Params, Validation) {
  LayoutParams p;
  p.passage_width = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = LayoutParams{};
  p.max_attempts = 0;
  EXPECT_THROW(p.validate(), Error);
  p = LayoutParams{};
  p.skip_prob = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Templates, DefaultsValidate) {
  for (const auto& t : default_fixture_templates()) {
    EXPECT_NO_THROW(t.validate());
    for (std::size_t k = 1; k < t.boards.size(); ++k) EXPECT_GT(t.boards[k].z, t.boards[k - 1].z);
  }
  FixtureTemplate bad = find_template(default_fixture_templates(), "shelf_a");
  std::swap(bad.boards[0].z, bad.boards[1].z);
  EXPECT_THROW(bad.validate(), Error);
}
