#include <gtest/gtest.h>

#include <cmath>

#include "darkstore/error.hpp"
#include "darkstore/rng.hpp"
#include "darkstore/tensor_field.hpp"
#include "oracles.hpp"

using namespace darkstore;

namespace {

// Closed-form major eigenvector direction of [[a, b], [b, -a]] from the
// eigenvector (b, lambda - a), lambda = hypot(a, b).
double eigen_direction(double a, double b) {
  const double lam = std::hypot(a, b);
  double x = b, y = lam - a;
  if (std::hypot(x, y) < 1e-12) {  // b = 0, a > 0: eigenvector (1, 0)
    x = 1.0;
    y = 0.0;
  }
  double ang = std::atan2(y, x);
  if (ang < 0) ang += kPi;
  if (ang >= kPi) ang -= kPi;
  return ang;
}

const Rect kRoom{{0, 0}, {10, 8}};

std::vector<Polygon> room_polygons() {
  return {resample_polygon(Polygon::rectangle(10, 8), 1.0),
          resample_polygon(Polygon::from_rect({{3, 2}, {5, 2.6}}), 1.0)};
}

}  // namespace

TEST(Basis, Examples) {
  const BasisTensor e1 = basis_from_edge({0, 0}, {1, 0});
  EXPECT_DOUBLE_EQ(e1.magnitude, 1.0);
  EXPECT_DOUBLE_EQ(e1.angle, 0.0);
  EXPECT_NEAR(e1.tensor().a, 1.0, 1e-15);
  EXPECT_NEAR(e1.tensor().b, 0.0, 1e-15);

  const BasisTensor e2 = basis_from_edge({0, 0}, {0, 2});
  EXPECT_DOUBLE_EQ(e2.magnitude, 2.0);
  EXPECT_DOUBLE_EQ(e2.angle, kPi / 2);
  EXPECT_NEAR(e2.tensor().a, -2.0, 1e-15);
  EXPECT_NEAR(e2.tensor().b, 0.0, 1e-15);

  const BasisTensor e3 = basis_from_edge({0, 0}, {1, 1});
  EXPECT_DOUBLE_EQ(e3.magnitude, std::sqrt(2.0));
  // Direct formula: l * (cos 2t, sin 2t) at t = pi/4.
  EXPECT_NEAR(e3.tensor().a, std::sqrt(2.0) * std::cos(kPi / 2), 1e-15);
  EXPECT_NEAR(e3.tensor().b, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(e3.anchor, (Vec2{0, 0}));
}

TEST(Basis, DegenerateEdge) {
  try {
    basis_from_edge({1, 1}, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_edge);
  }
}

TEST(Basis, AngleRange) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 a{rng.uniform(-1, 1), rng.uniform(-1, 1)}, b{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const BasisTensor t = basis_from_edge(a, b);
    EXPECT_GT(t.angle, -kPi);
    EXPECT_LE(t.angle, kPi);
    EXPECT_GE(t.magnitude, 0.0);
  }
  EXPECT_DOUBLE_EQ(basis_from_edge({0, 0}, {-1, 0}).angle, kPi);
}

TEST(MajorDirection, Examples) {
  EXPECT_DOUBLE_EQ(*major_direction({1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*major_direction({-1, 0}), kPi / 2);
  EXPECT_NEAR(*major_direction({0, 1}), kPi / 4, 1e-15);
  EXPECT_FALSE(major_direction({1e-7, 0}).has_value());
  EXPECT_FALSE(major_direction({0, 0}).has_value());
}

TEST(MajorDirection, MatchesEigenvector) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    const double got = *major_direction({a, b});
    EXPECT_GE(got, 0.0);
    EXPECT_LT(got, kPi);
    EXPECT_NEAR(direction_difference(got, eigen_direction(a, b)), 0.0, 1e-12);
  }
}

TEST(Field, EmptyPolygonListThrows) {
  try {
    build_field({}, 0.4, 0.25, kRoom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_field);
  }
}

TEST(Field, SingleBasisAtAnchorIsTheBasis) {
  const TensorField f({basis_from_edge({2, 2}, {3, 2.5})}, 0.4, 0.25, kRoom);
  const SymTensor2 t = f.analytic({2, 2});
  EXPECT_EQ(t, basis_from_edge({2, 2}, {3, 2.5}).tensor());
}

TEST(Field, TwoIdenticalBasesDouble) {
  const BasisTensor b = basis_from_edge({2, 2}, {3, 2.5});
  const TensorField one({b}, 0.4, 0.25, kRoom), two({b, b}, 0.4, 0.25, kRoom);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{rng.uniform(0, 10), rng.uniform(0, 8)};
    const SymTensor2 s = one.analytic(p), d = two.analytic(p);
    EXPECT_DOUBLE_EQ(d.a, 2 * s.a);
    EXPECT_DOUBLE_EQ(d.b, 2 * s.b);
  }
}

TEST(Field, UnitSquareCentreMatchesScalarLoop) {
  const Polygon sq = resample_polygon(Polygon::rectangle(1, 1), 1.0);
  const TensorField f = build_field(std::vector<Polygon>{sq}, 1.0, 0.05, {{0, 0}, {1, 1}});
  const SymTensor2 got = f.analytic({0.5, 0.5});
  const SymTensor2 want = oracle::field_sum(f.bases(), 1.0, {0.5, 0.5});
  EXPECT_NEAR(got.a, want.a, 1e-14);
  EXPECT_NEAR(got.b, want.b, 1e-14);
  EXPECT_EQ(f.bases().size(), 4u);
}

TEST(Field, GridEqualsAnalyticAtLattice) {
  const TensorField f = build_field(room_polygons(), 0.4, 0.25, kRoom);
  for (std::size_t j = 0; j < f.ny(); ++j) {
    for (std::size_t i = 0; i < f.nx(); ++i) {
      const Vec2 p = f.lattice_point(i, j);
      const SymTensor2 want = oracle::field_sum(f.bases(), 0.4, p);
      ASSERT_NEAR(f.at(i, j).a, want.a, 1e-12);
      ASSERT_NEAR(f.at(i, j).b, want.b, 1e-12);
      ASSERT_EQ(f.eval(p), f.at(i, j));
    }
  }
  // The grid covers the rectangle.
  EXPECT_LE(f.lattice_point(0, 0).x, kRoom.min.x);
  EXPECT_GE(f.lattice_point(f.nx() - 1, f.ny() - 1).x, kRoom.max.x);
  EXPECT_GE(f.lattice_point(f.nx() - 1, f.ny() - 1).y, kRoom.max.y);
}

TEST(Field, MidpointIsAverage) {
  const TensorField f = build_field(room_polygons(), 0.4, 0.25, kRoom);
  const Vec2 p0 = f.lattice_point(5, 7), p1 = f.lattice_point(6, 7);
  const SymTensor2 mid = f.eval((p0 + p1) * 0.5);
  EXPECT_NEAR(mid.a, 0.5 * (f.at(5, 7).a + f.at(6, 7).a), 1e-14);
  EXPECT_NEAR(mid.b, 0.5 * (f.at(5, 7).b + f.at(6, 7).b), 1e-14);
}

TEST(Field, OutOfBoundsThrows) {
  const TensorField f = build_field(room_polygons(), 0.4, 0.25, kRoom);
  try {
    f.eval({-1, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_bounds);
  }
}

TEST(Field, InterpolationConvergesQuadratically) {
  const auto polys = room_polygons();
  Rng rng(5);
  std::vector<Vec2> probes;
  for (int i = 0; i < 200; ++i) probes.push_back({rng.uniform(0.5, 9.5), rng.uniform(0.5, 7.5)});
  auto err = [&](double h) {
    const TensorField f = build_field(polys, 0.4, h, kRoom);
    double e = 0.0;
    for (Vec2 p : probes) {
      const SymTensor2 a = f.eval(p), b = f.analytic(p);
      e = std::max(e, std::hypot(a.a - b.a, a.b - b.b));
    }
    return e;
  };
  const double coarse = err(0.4), fine = err(0.05);
  // 8x finer under O(h^2) is ~64x smaller; allow a generous margin for kinks at anchors.
  EXPECT_LT(fine, coarse / 20.0);
}

TEST(Field, RotationEquivariance) {
  Rng rng(6);
  const Vec2 c{5, 4};
  for (int trial = 0; trial < 10; ++trial) {
    const double phi = rng.uniform(-kPi, kPi);
    std::vector<BasisTensor> bases, rotated;
    for (const Polygon& p : room_polygons()) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 a = p[i], b = p.edge_end(i);
        bases.push_back(basis_from_edge(a, b));
        rotated.push_back(basis_from_edge(c + rotate(a - c, phi), c + rotate(b - c, phi)));
      }
    }
    const TensorField f(bases, 0.4, 0.5, {{-10, -10}, {20, 20}});
    const TensorField g(rotated, 0.4, 0.5, {{-10, -10}, {20, 20}});
    for (int i = 0; i < 100; ++i) {
      const Vec2 p{rng.uniform(0, 10), rng.uniform(0, 8)};
      const auto d0 = major_direction(f.analytic(p));
      const auto d1 = major_direction(g.analytic(c + rotate(p - c, phi)));
      if (!d0 || !d1) continue;
      EXPECT_NEAR(direction_difference(*d1, *d0 + phi), 0.0, 1e-9);
    }
  }
}

TEST(Field, LocalityAndDecay) {
  const BasisTensor b = basis_from_edge({1, 1}, {2, 1});
  const TensorField f({b}, 0.4, 0.25, kRoom), g({b}, 0.8, 0.25, kRoom);
  double prev = 1e300;
  for (double r = 0.0; r < 8.0; r += 0.25) {
    const Vec2 p{1 + r * 0.6, 1 + r * 0.8};
    if (!kRoom.contains(p)) break;
    const double m = f.analytic(p).magnitude();
    EXPECT_LT(m, prev);
    prev = m;
    if (r > 0) EXPECT_LE(g.analytic(p).magnitude(), m);
  }
}

TEST(Field, Linearity) {
  const auto polys = room_polygons();
  const TensorField a = build_field(std::vector<Polygon>{polys[0]}, 0.4, 0.25, kRoom);
  const TensorField b = build_field(std::vector<Polygon>{polys[1]}, 0.4, 0.25, kRoom);
  const TensorField ab = build_field(polys, 0.4, 0.25, kRoom);
  for (std::size_t j = 0; j < ab.ny(); j += 3) {
    for (std::size_t i = 0; i < ab.nx(); i += 3) {
      EXPECT_NEAR(ab.at(i, j).a, a.at(i, j).a + b.at(i, j).a, 1e-12);
      EXPECT_NEAR(ab.at(i, j).b, a.at(i, j).b + b.at(i, j).b, 1e-12);
    }
  }
}

TEST(Field, TracelessRepresentation) {
  const TensorField f = build_field(room_polygons(), 0.4, 0.25, kRoom);
  for (std::size_t j = 0; j < f.ny(); j += 2) {
    for (std::size_t i = 0; i < f.nx(); i += 2) {
      const SymTensor2 t = f.at(i, j);
      // [[a, b], [b, -a]]: trace a + (-a) and off-diagonals equal.
      const double m[2][2] = {{t.a, t.b}, {t.b, -t.a}};
      EXPECT_EQ(m[0][0] + m[1][1], 0.0);
      EXPECT_EQ(m[0][1], m[1][0]);
    }
  }
}

TEST(Field, GlyphsSkipDegenerate) {
  const TensorField f = build_field(room_polygons(), 0.4, 0.25, kRoom);
  std::size_t expected = 0;
  for (std::size_t j = 0; j < f.ny(); ++j) {
    for (std::size_t i = 0; i < f.nx(); ++i) expected += major_direction(f.at(i, j)).has_value();
  }
  EXPECT_EQ(field_glyphs(f).size(), expected);
}
