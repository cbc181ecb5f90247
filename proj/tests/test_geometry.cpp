#include <gtest/gtest.h>

#include <cmath>

#include "darkstore/error.hpp"
#include "darkstore/geometry.hpp"
#include "darkstore/rng.hpp"
#include "oracles.hpp"

using namespace darkstore;

namespace {

double max_edge(const Polygon& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, (p.edge_end(i) - p[i]).norm());
  return m;
}

Obb2 random_box(Rng& rng) {
  return {{rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)},
          rng.uniform(-kPi, kPi)};
}

Polygon random_star(Rng& rng) {
  const int n = 3 + static_cast<int>(rng.below(10));
  // Jittered even spacing keeps every angular gap below pi, so the star is simple.
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * (i + rng.uniform(0.1, 0.9)) / n;
    const double r = rng.uniform(0.3, 2.0);
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return Polygon(v);
}

}  // namespace

TEST(Resample, ShortEdgesUnchanged) {
  const Polygon sq = Polygon::rectangle(1, 1);
  EXPECT_EQ(resample_polygon(sq, 2.0), sq);
}

TEST(Resample, UnitSquareHalfMetre) {
  const Polygon r = resample_polygon(Polygon::rectangle(1, 1), 0.5);
  ASSERT_EQ(r.size(), 8u);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR((r.edge_end(i) - r[i]).norm(), 0.5, 1e-12);
}

TEST(Resample, TenByFourHas28Vertices) {
  const Polygon r = resample_polygon(Polygon::rectangle(10, 4), 1.0);
  EXPECT_EQ(r.size(), 28u);
  EXPECT_LE(max_edge(r), 1.0);
}

TEST(Resample, RejectsNonPositiveLength) {
  try {
    resample_polygon(Polygon::rectangle(1, 1), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_parameter);
  }
}

TEST(Resample, PreservesPerimeterAndVertices) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Polygon p = random_star(rng);
    const double d = rng.uniform(0.05, 1.5);
    const Polygon r = resample_polygon(p, d);
    EXPECT_NEAR(r.perimeter(), p.perimeter(), 1e-9);
    EXPECT_LE(max_edge(r), d);
    // Every input vertex survives, in order.
    std::size_t k = 0;
    for (std::size_t i = 0; i < r.size() && k < p.size(); ++i) {
      if (r[i] == p[k]) ++k;
    }
    EXPECT_EQ(k, p.size());
  }
}

TEST(Polygon, RejectsSelfIntersection) {
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}}), Error);
}

TEST(Polygon, ClockwiseInputIsReversed) {
  const Polygon p({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(p.signed_area(), 0.0);
}

TEST(ObbOverlap, Examples) {
  const Obb2 unit{{0, 0}, {0.5, 0.5}, 0.0};
  EXPECT_TRUE(obb_overlap(unit, unit));
  EXPECT_FALSE(obb_overlap(unit, {{3, 0}, {0.5, 0.5}, 0.0}));
  const Obb2 tilted{{1.05, 0}, {0.5, 0.5}, kPi / 4};
  EXPECT_TRUE(obb_overlap(unit, tilted));
  EXPECT_GT(oracle::overlap_area(unit, tilted), 0.0);
}

TEST(ObbOverlap, TouchingCountsAsOverlap) {
  const Obb2 a{{0, 0}, {0.5, 0.5}, 0.0};
  EXPECT_TRUE(obb_overlap(a, {{1.0, 0}, {0.5, 0.5}, 0.0}));
}

TEST(ObbOverlap, AgreesWithClippingOracle) {
  Rng rng(3);
  int checked = 0;
  for (int t = 0; t < 5000; ++t) {
    const Obb2 a = random_box(rng), b = random_box(rng);
    const double area = oracle::overlap_area(a, b);
    const double gap = oracle::box_gap(a, b);
    if (area > 1e-9) {
      EXPECT_TRUE(obb_overlap(a, b));
      ++checked;
    } else if (gap > 1e-9) {
      EXPECT_FALSE(obb_overlap(a, b));
      ++checked;
    }
  }
  EXPECT_GT(checked, 4900);
}

TEST(ObbOverlap, SymmetricAndRigidInvariant) {
  Rng rng(5);
  for (int t = 0; t < 2000; ++t) {
    Obb2 a = random_box(rng), b = random_box(rng);
    ASSERT_EQ(obb_overlap(a, b), obb_overlap(b, a));
    if (std::abs(oracle::box_gap(a, b)) < 1e-6 && oracle::overlap_area(a, b) < 1e-6) continue;  // near contact
    const double phi = rng.uniform(-kPi, kPi);
    const Vec2 shift{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    auto move = [&](Obb2 o) {
      o.center = rotate(o.center, phi) + shift;
      o.yaw += phi;
      return o;
    };
    EXPECT_EQ(obb_overlap(a, b), obb_overlap(move(a), move(b)));
  }
}

TEST(PointInPolygon, Examples) {
  const Polygon sq = Polygon::rectangle(1, 1);
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({2, 2}, sq));
  EXPECT_TRUE(point_in_polygon({0.5, 1.0}, sq));
}

TEST(PointInPolygon, MatchesWindingNumber) {
  Rng rng(7);
  for (int poly = 0; poly < 5; ++poly) {
    const Polygon p = random_star(rng);
    for (int i = 0; i < 10000; ++i) {
      const Vec2 q{rng.uniform(-2.2, 2.2), rng.uniform(-2.2, 2.2)};
      if (oracle::boundary_distance(q, p.vertices()) < 1e-7) continue;
      ASSERT_EQ(point_in_polygon(q, p), oracle::winding_number(q, p.vertices()) != 0);
    }
  }
}

TEST(SphereClearance, Examples) {
  const Obb3 box{{{0, 0}, {0.5, 0.5}, 0.0}, 0.0, 1.0};
  EXPECT_LT(sphere_obb_clearance({0, 0, 0.5}, 0.1, box), 0.0);
  EXPECT_NEAR(sphere_obb_clearance({1.5, 0, 0.5}, 0.1, box), 0.9, 1e-12);
}

TEST(SphereClearance, SignMatchesSurfaceSampling) {
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const Obb3 box{random_box(rng), rng.uniform(-0.5, 0.0), rng.uniform(0.2, 1.0)};
    const Vec3 c{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 2)};
    const double r = rng.uniform(0.05, 0.5);
    // Dense samples on the six faces.
    const int n = 40;
    double best = 1e300;
    const auto& f = box.footprint;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double u = -1.0 + 2.0 * i / n, v = -1.0 + 2.0 * j / n, w = static_cast<double>(j) / n;
        const std::array<Vec3, 6> local{Vec3{u * f.half_extents.x, v * f.half_extents.y, box.z_min},
                                        Vec3{u * f.half_extents.x, v * f.half_extents.y, box.z_max},
                                        Vec3{-f.half_extents.x, u * f.half_extents.y, box.z_min + w * (box.z_max - box.z_min)},
                                        Vec3{f.half_extents.x, u * f.half_extents.y, box.z_min + w * (box.z_max - box.z_min)},
                                        Vec3{u * f.half_extents.x, -f.half_extents.y, box.z_min + w * (box.z_max - box.z_min)},
                                        Vec3{u * f.half_extents.x, f.half_extents.y, box.z_min + w * (box.z_max - box.z_min)}};
        for (const Vec3& l : local) {
          const Vec2 xy = f.to_world(l.xy());
          best = std::min(best, (Vec3{xy.x, xy.y, l.z} - c).norm());
        }
      }
    }
    const bool inside = box.contains(c, 0.0);
    const double sampled = inside ? -best - r : best - r;
    const double got = sphere_obb_clearance(c, r, box);
    const double res = 2.0 * std::max({f.half_extents.x, f.half_extents.y, box.z_max - box.z_min}) / n;
    if (std::abs(sampled) > res) EXPECT_EQ(got < 0.0, sampled < 0.0) << t;
    // Sampling can only overestimate the distance to the surface.
    if (!inside) EXPECT_LE(got, sampled + 1e-12);
  }
}

TEST(Angles, WrapRanges) {
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::remainder(w - a, 2 * kPi), 0.0, 1e-12);
    const double h = wrap_half_turn(a);
    EXPECT_GE(h, 0.0);
    EXPECT_LT(h, kPi);
  }
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(direction_difference(0.01, kPi - 0.01), 0.02, 1e-12);
}

TEST(Quat, LogExpRoundTrip) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const Vec3 rv{rng.uniform(-1.7, 1.7), rng.uniform(-1.7, 1.7), rng.uniform(-1.7, 1.7)};
    if (rv.norm() >= kPi) continue;
    const Vec3 back = Quat::exp(rv).log();
    EXPECT_NEAR((back - rv).norm(), 0.0, 1e-12);
  }
}
