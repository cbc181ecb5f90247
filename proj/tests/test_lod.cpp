#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "darkstore/error.hpp"
#include "darkstore/lod.hpp"
#include "oracles.hpp"

using namespace darkstore;

namespace {

TriMesh single_triangle() {
  TriMesh m;
  m.vertices = {{0, 0, 1}, {2, 0, 1}, {0, 1, 1}};
  m.triangles = {{0, 1, 2}};
  return m;
}

LodCandidate cand(double chamfer, std::size_t tris, LodMethod method = LodMethod::cluster, double cell = 0.0) {
  LodCandidate c;
  c.method = method;
  c.cell_fraction = cell;
  c.chamfer = chamfer;
  c.tri_count = tris;
  return c;
}

// Chamfer between two independent samplings of the same surface.
double noise_floor(const TriMesh& m, std::size_t n, std::uint64_t seed) {
  Rng a(seed), b(seed + 1000);
  const auto pa = sample_surface_points(m, n, a), pb = sample_surface_points(m, n, b);
  return chamfer_distance(pa, pb);
}

double sampled_chamfer(const TriMesh& x, const TriMesh& y, std::size_t n, std::uint64_t seed) {
  Rng a(seed), b(seed + 1);
  const auto pa = sample_surface_points(x, n, a), pb = sample_surface_points(y, n, b);
  return chamfer_distance(pa, pb);
}

}  // namespace

TEST(Sampling, PointsLieOnTriangle) {
  Rng rng(1);
  const auto pts = sample_surface_points(single_triangle(), 1000, rng);
  ASSERT_EQ(pts.size(), 1000u);
  std::vector<Vec2> tri = {{0, 0}, {2, 0}, {0, 1}};
  for (const Vec3& p : pts) {
    EXPECT_NEAR(p.z, 1.0, 1e-12);
    EXPECT_TRUE(oracle::winding_number(p.xy(), tri) != 0 || oracle::boundary_distance(p.xy(), tri) < 1e-12);
  }
}

TEST(Sampling, AreaProportional) {
  TriMesh m;
  // Areas 4.5 and 0.5.
  m.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {10, 0, 0}, {11, 0, 0}, {10, 1, 0}};
  m.triangles = {{0, 1, 2}, {3, 4, 5}};
  Rng rng(2);
  const std::size_t n = 100000;
  std::size_t big = 0;
  for (const Vec3& p : sample_surface_points(m, n, rng)) big += p.x < 5.0;
  const double sd = std::sqrt(n * 0.9 * 0.1);
  EXPECT_NEAR(static_cast<double>(big), 0.9 * n, 3 * sd);
}

TEST(Sampling, UnitSquareCentroid) {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  Rng rng(3);
  Vec3 c{};
  const auto pts = sample_surface_points(m, 100000, rng);
  for (const Vec3& p : pts) c = c + p;
  c = c * (1.0 / pts.size());
  EXPECT_NEAR(c.x, 0.5, 0.01);
  EXPECT_NEAR(c.y, 0.5, 0.01);
}

TEST(Sampling, Errors) {
  Rng rng(4);
  try {
    sample_surface_points(TriMesh{}, 10, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_mesh);
  }
  EXPECT_THROW(sample_surface_points(single_triangle(), 0, rng), Error);
}

TEST(Chamfer, Examples) {
  const std::vector<Vec3> a = {{0, 0, 0}}, b = {{1, 0, 0}};
  EXPECT_DOUBLE_EQ(chamfer_distance(a, b), 2.0);
  Rng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  EXPECT_EQ(chamfer_distance(pts, pts), 0.0);
  EXPECT_THROW(chamfer_distance(std::vector<Vec3>{}, pts), Error);
}

TEST(Chamfer, MatchesBruteForce) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> a, b;
    for (int i = 0; i < 500; ++i) a.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    for (int i = 0; i < 500; ++i) b.push_back({rng.uniform(), rng.normal(0.5, 0.3), rng.uniform()});
    const double fast = chamfer_distance(a, b);
    EXPECT_NEAR(fast, oracle::chamfer_bruteforce(a, b), 1e-12);
    EXPECT_NEAR(fast, chamfer_distance(b, a), 1e-12);
    EXPECT_GE(fast, 0.0);
  }
}

TEST(Decimate, FineCellKeepsConnectivity) {
  const TriMesh m = mesh::box({1, 1, 1}, 4);
  const TriMesh d = decimate_cluster(m, 1e-3);
  EXPECT_EQ(d.triangles.size(), m.triangles.size());
  EXPECT_EQ(d.vertices.size(), m.vertices.size());
}

TEST(Decimate, HugeCellCollapses) {
  const TriMesh m = mesh::box({1, 1, 1}, 1);
  EXPECT_EQ(m.tri_count(), 12u);
  EXPECT_TRUE(decimate_cluster(m, 2.0).empty());
  // Collapsed candidates never reach the candidate list.
  for (const auto& c : generate_candidates(m, LodParams{})) EXPECT_GT(c.tri_count, 0u);
  EXPECT_THROW(decimate_cluster(m, 0.0), Error);
}

TEST(Decimate, DenseSphere) {
  const double r = 0.5;
  const TriMesh s = mesh::uv_sphere(r, 50, 100);
  ASSERT_GT(s.tri_count(), 9000u);
  const TriMesh d = decimate_cluster(s, 0.2 * r);
  EXPECT_LE(d.tri_count(), s.tri_count() / 10);
  EXPECT_NO_THROW(d.validate());
  EXPECT_LE(sampled_chamfer(s, d, 10000, 7), 0.1 * r);
}

TEST(Decimate, NeverGrows) {
  for (const auto& a : synthetic_assets()) {
    for (double f : {0.003, 0.01, 0.05, 0.2}) {
      EXPECT_LE(decimate_cluster(a.mesh, f * a.mesh.diagonal()).tri_count(), a.mesh.tri_count());
    }
  }
}

TEST(Fit, BoxRecoversBox) {
  const TriMesh m = mesh::box({0.3, 0.2, 0.5}, 6);
  const TriMesh fit = fit_primitive(m, PrimitiveKind::box);
  EXPECT_EQ(fit.tri_count(), 12u);
  const auto [lo, hi] = fit.bounds();
  const auto [mlo, mhi] = m.bounds();
  EXPECT_EQ(lo, mlo);
  EXPECT_EQ(hi, mhi);
  // Same surface, so only sampling noise remains.
  EXPECT_LE(sampled_chamfer(m, fit, 8192, 8), 1.5 * noise_floor(m, 8192, 8));
}

TEST(Fit, CylinderWithinSagitta) {
  const double r = 0.05, h = 0.2;
  const TriMesh m = mesh::cylinder(r, h, 64, 4);
  const TriMesh fit = fit_primitive(m, PrimitiveKind::cylinder, 16);
  EXPECT_EQ(fit.tri_count(), 4u * 16u);
  // Each direction's nearest-point error is bounded by the chord sagitta of
  // the coarser polygon; add the sampling floor of the finer surface.
  const double sagitta = r * (1.0 - std::cos(kPi / 16.0));
  EXPECT_LE(sampled_chamfer(m, fit, 8192, 9), 2.0 * sagitta + noise_floor(m, 8192, 9));
}

TEST(Fit, LShapeBoxIsWorse) {
  const TriMesh m = mesh::l_shape(0.2, 0.2, 0.05, 0.1, 20);
  const TriMesh fit = fit_primitive(m, PrimitiveKind::box);
  EXPECT_GT(sampled_chamfer(m, fit, 8192, 10), 3.0 * noise_floor(m, 8192, 10));
  EXPECT_THROW(fit_primitive(TriMesh{}, PrimitiveKind::box), Error);
}

TEST(Pareto, Examples) {
  const std::vector<LodCandidate> one = {cand(0, 5, LodMethod::original)};
  EXPECT_EQ(pareto_front(one), (std::vector<std::size_t>{0}));
  const std::vector<LodCandidate> three = {cand(0, 100, LodMethod::original), cand(5, 10), cand(5, 50)};
  EXPECT_EQ(pareto_front(three), (std::vector<std::size_t>{0, 1}));
}

TEST(Pareto, RandomSetsMatchOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<LodCandidate> c;
    const std::size_t n = 1 + rng.below(12);
    c.push_back(cand(0.0, 1000, LodMethod::original));
    for (std::size_t i = 1; i < n; ++i) {
      // Coarse values so ties in both coordinates occur.
      c.push_back(cand(static_cast<double>(rng.below(6)), 10 * (1 + rng.below(8)), LodMethod::cluster, 0.01 * i));
    }
    const auto front = pareto_front(c);
    ASSERT_EQ(front, oracle::pareto_front(c));
    // Mutually non-dominating, and every excluded candidate is dominated.
    auto dominates = [&](std::size_t a, std::size_t b) {
      return c[a].chamfer <= c[b].chamfer && c[a].tri_count <= c[b].tri_count &&
             (c[a].chamfer < c[b].chamfer || c[a].tri_count < c[b].tri_count);
    };
    for (std::size_t a : front) {
      for (std::size_t b : front) EXPECT_FALSE(dominates(a, b));
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (std::find(front.begin(), front.end(), k) != front.end()) continue;
      bool dominated = false;
      for (std::size_t a : front) dominated = dominated || dominates(a, k);
      EXPECT_TRUE(dominated);
    }
    const std::size_t sel = select_lod(c);
    ASSERT_EQ(sel, oracle::select_lod(c));
    EXPECT_NE(std::find(front.begin(), front.end(), sel), front.end());
  }
}

TEST(Select, OnlyOriginal) {
  const std::vector<LodCandidate> c = {cand(0, 500, LodMethod::original)};
  EXPECT_EQ(select_lod(c), 0u);
  const auto s = lod_scores(c);
  EXPECT_EQ(s[0].rel_dist, 0.0);
  EXPECT_EQ(s[0].rel_tris, 1.0);
}

TEST(Select, ArithmeticExample) {
  // rel units: chamfer over 0.9, triangles over 1000.
  const std::vector<LodCandidate> c = {cand(0.0, 1000, LodMethod::original), cand(0.3, 100), cand(0.9, 50)};
  const std::size_t sel = select_lod(c);
  EXPECT_EQ(sel, 1u);
  const auto s = lod_scores(c);
  EXPECT_NEAR(s[1].rel_dist, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[1].rel_tris, 0.1, 1e-15);
  // With the front written directly in relative units.
  const std::vector<LodCandidate> rel = {cand(0.0, 100, LodMethod::original), cand(0.3, 10), cand(0.9, 5)};
  std::vector<LodCandidate> scaled = rel;
  scaled.push_back(cand(1.0, 1));  // anchors max chamfer at 1
  const auto rs = lod_scores(scaled);
  EXPECT_NEAR(rs[1].total(), 0.4, 1e-15);
}

TEST(Select, TieBreak) {
  std::vector<LodCandidate> c = {cand(0.0, 100, LodMethod::original), cand(0.5, 50, LodMethod::box_fit),
                                 cand(0.5, 50, LodMethod::cylinder_fit), cand(1.0, 0 + 1)};
  // box_fit and cylinder_fit tie exactly; the tag decides.
  const std::size_t sel = select_lod(c);
  EXPECT_EQ(sel, oracle::select_lod(c));
}

TEST(Candidates, ScoresInUnitRange) {
  for (const auto& a : synthetic_assets()) {
    const auto c = generate_candidates(a.mesh, LodParams{});
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c[0].method, LodMethod::original);
    EXPECT_EQ(c[0].chamfer, 0.0);
    for (const auto& x : c) {
      EXPECT_EQ(x.tri_count, x.mesh.tri_count());
      EXPECT_GE(x.chamfer, 0.0);
    }
    for (const auto& s : lod_scores(c)) {
      EXPECT_GE(s.rel_dist, 0.0);
      EXPECT_LE(s.rel_dist, 1.0);
      EXPECT_GE(s.rel_tris, 0.0);
      EXPECT_LE(s.rel_tris, 1.0);
    }
  }
}

TEST(Candidates, ScaleEquivariance) {
  LodParams params;
  params.samples = 4096;
  for (const auto& a : synthetic_assets()) {
    const LodResult base = optimize_asset(a.id, a.mesh, params);
    const LodResult big = optimize_asset(a.id, a.mesh.scaled(8.0), params);
    EXPECT_EQ(base.record.method, big.record.method) << a.id;
    EXPECT_NEAR(big.record.chamfer, 8.0 * base.record.chamfer, 1e-6 * big.record.chamfer + 1e-12) << a.id;
  }
}

TEST(Candidates, ExternalMeshesAreScored) {
  const TriMesh m = mesh::box({0.2, 0.2, 0.2}, 8);
  const std::vector<ExternalMesh> ext = {{"coarse", mesh::box({0.2, 0.2, 0.2}, 1)}};
  const auto c = generate_candidates(m, LodParams{}, ext);
  bool found = false;
  for (const auto& x : c) {
    if (x.method == LodMethod::external) {
      found = true;
      EXPECT_EQ(x.tag(), "external:coarse");
      EXPECT_EQ(x.tri_count, 12u);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Obj, RoundTrip) {
  const TriMesh m = mesh::bottle(0.04, 0.28, 16, 10);
  std::stringstream ss;
  write_obj(ss, m);
  const TriMesh back = read_obj(ss);
  EXPECT_EQ(back, m);
}

TEST(Obj, PolygonFacesAndIndices) {
  std::stringstream ss("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1 4/1\nf -4 -3 -2\n");
  const TriMesh m = read_obj(ss);
  EXPECT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.triangles.size(), 3u);
  EXPECT_EQ(m.triangles[1], (std::array<std::uint32_t, 3>{0, 2, 3}));
  EXPECT_EQ(m.triangles[2], (std::array<std::uint32_t, 3>{0, 1, 2}));
  std::stringstream bad("v 0 0 0\nf 1 2 3\n");
  EXPECT_THROW(read_obj(bad), Error);
}

TEST(Mesh, Validation) {
  TriMesh m = single_triangle();
  EXPECT_NO_THROW(m.validate());
  m.triangles.push_back({0, 1, 7});
  EXPECT_THROW(m.validate(), Error);
  m = single_triangle();
  m.vertices[0].x = std::nan("");
  EXPECT_THROW(m.validate(), Error);
  for (const auto& a : synthetic_assets()) {
    EXPECT_NO_THROW(a.mesh.validate());
    EXPECT_GT(a.mesh.tri_count(), 8000u);
  }
}
